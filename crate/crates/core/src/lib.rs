//! Chua-circuit reservoir computing in simulation.
//!
//! See the guide under `book/` for a walk-through of each module.

pub mod circuit;
pub mod error;
pub mod harness;
pub mod io;
pub mod lwe;
pub mod reservoir;
pub mod seed;
pub mod tasks;

pub use error::{Error, Result};

// Run the guide's code blocks as doctests.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
pub struct GuideIntroduction;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/circuit.md")]
pub struct GuideCircuit;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/reservoir.md")]
pub struct GuideReservoir;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/readout.md")]
pub struct GuideReadout;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/lwe.md")]
pub struct GuideLwe;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/experiments.md")]
pub struct GuideExperiments;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/formats.md")]
pub struct GuideFormats;

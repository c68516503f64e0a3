//! Time-multiplexed reservoir pipeline around the Chua kernel: input
//! pre-processing, demultiplexing of the taps into virtual neurons, linear
//! readout and error metrics.

pub mod config;
pub mod input;
pub mod metrics;
pub mod output;
pub mod pipeline;
pub mod readout;

pub use config::{resonant_carrier, Carrier, ReservoirConfig, N_TAPS};
pub use input::{denormalize, make_mask, modulate, multiplex, normalize, sample_hold, Mask};
pub use metrics::{nmse, nmse_case, nmse_scalar, nrmse, ConfusionMatrix, NmseReport, DEFAULT_NMSE_CAP};
pub use output::{align_trace, demultiplex, envelope_extract, SlotLayout, StateMatrix};
pub use pipeline::{build_drive, passthrough_kernel, run_case, run_case_with, DUMMY_VALUE};
pub use readout::{train_readout, Accumulator, ReadoutOptions, ReadoutWeight};

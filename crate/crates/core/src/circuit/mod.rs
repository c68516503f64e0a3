//! The chaotic kernel: a Kennedy Chua circuit with a series voltage drive.
//!
//! State is `(I_L, V_C2, V_C1)`. Two taps are reported: the diode voltage
//! `v_cd = V_C1` and the inductor tap `v_l = V_C2 − r_series·I_L − v_in`.

pub mod bifurcation;
pub mod diode;
pub mod noise;
pub mod ode;
pub mod spectrum;

pub use bifurcation::{bifurcation_scan, BifurcationPoint, BifurcationScan, ScanDrive, ScanParameter, Tap, Waveform};
pub use diode::{diode_current, DiodePwl, NicBranch};
pub use noise::{inject_noise, snr_db, NoiseSpec};
pub use ode::{
    derivatives, final_state, integrate, integrate_sampled, integrate_with, ChuaParams, CircuitState, DriveSignal,
    Trace, DEFAULT_DT, TAP_DIODE, TAP_INDUCTOR,
};
pub use spectrum::{power_spectrum, Spectrum};

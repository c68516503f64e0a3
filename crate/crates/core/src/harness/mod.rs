//! Experiment orchestration: configuration, runs and sweeps, metrics
//! reports, artifact files and plots.

pub mod artifacts;
pub mod config;
pub mod experiment;
pub mod plot;
pub mod sweep;

pub use artifacts::{
    bifurcation_csv, load_weight, run_bifurcation, run_simulation, run_spectrum, save_weight, spectrum_csv, state_csv,
    trace_csv, with_jobs, DigestCheck, JOBS_ENV,
};
pub use config::{load_config, parse_config, ExperimentConfig, Profile, SimulationConfig, SweepGrid};
pub use experiment::{
    build_dataset, cases_csv, evaluate, run_experiment, simulate_inputs, surface_csv, write_artifacts, CaseFailure,
    CaseResult, ExperimentOutcome, MetricsReport,
};
pub use plot::{detect_schema, render_plot, render_plot_file, PlotKind};
pub use sweep::{cell_config, run_sweep, sweep_csv, SweepCell};

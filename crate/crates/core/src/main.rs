use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chua_rc::harness::{
    bifurcation_csv, cases_csv, evaluate, load_config, load_weight, render_plot_file, run_bifurcation, run_experiment,
    run_simulation, run_spectrum, run_sweep, spectrum_csv, sweep_csv, trace_csv, with_jobs, write_artifacts,
    ExperimentConfig,
};
use chua_rc::io::write_json;
use chua_rc::{harness, Error, Result};

#[derive(Parser)]
#[command(name = "chua-rc", version, about = "Chua-circuit reservoir computing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; fields left out take the profile defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads. Defaults to $CHUA_RC_JOBS, then one per core.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the circuit and write `trace.csv`.
    Simulate(Common),
    /// Scan a circuit parameter and write `bifurcation.csv`.
    Bifurcate(Common),
    /// Write the magnitude spectrum of the configured tap to `spectrum.csv`.
    Spectrum(Common),
    /// Generate the task dataset without simulating it.
    Dataset(Common),
    /// Simulate the dataset, train the readout and score the validation split.
    Train(Common),
    /// Score the validation split with a saved weight.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        weight: PathBuf,
    },
    /// Mean NMSE over the resistance × input-window grid.
    Sweep(Common),
    /// Render a CSV artifact to SVG.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn resolve(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(p) => load_config(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.master_seed = s;
    }
    if let Some(o) = &c.out {
        cfg.output_dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn announce(path: &Path) {
    println!("{}", path.display());
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Plot { input, out } => {
            render_plot_file(&input, &out)?;
            announce(&out);
        }
        Command::Simulate(c) => {
            let cfg = resolve(&c)?;
            let trace = with_jobs(c.jobs, || run_simulation(&cfg))??;
            let p = cfg.output_dir.join("trace.csv");
            trace_csv(&trace, &cfg.digest()).save(&p)?;
            announce(&p);
        }
        Command::Spectrum(c) => {
            let cfg = resolve(&c)?;
            let s = with_jobs(c.jobs, || run_spectrum(&cfg))??;
            let p = cfg.output_dir.join("spectrum.csv");
            spectrum_csv(&s, &cfg.digest()).save(&p)?;
            announce(&p);
        }
        Command::Bifurcate(c) => {
            let cfg = resolve(&c)?;
            let points = with_jobs(c.jobs, || run_bifurcation(&cfg))??;
            for p in &points {
                if let Some(f) = &p.failure {
                    log::warn!("scan point {} failed: {f}", p.value);
                }
            }
            let p = cfg.output_dir.join("bifurcation.csv");
            bifurcation_csv(&points, &cfg.digest()).save(&p)?;
            announce(&p);
        }
        Command::Dataset(c) => {
            let cfg = resolve(&c)?;
            let ds = harness::build_dataset(&cfg)?;
            let p = match &ds.lwe_cases {
                Some(cases) => {
                    let p = cfg.output_dir.join("dataset.json");
                    chua_rc::lwe::save_dataset(cases, &p)?;
                    p
                }
                None => {
                    let p = cfg.output_dir.join("dataset.csv");
                    ds.to_csv(Some(&cfg.digest())).save(&p)?;
                    p
                }
            };
            announce(&p);
        }
        Command::Train(c) => {
            let cfg = resolve(&c)?;
            let outcome = with_jobs(c.jobs, || run_experiment(&cfg))??;
            for p in write_artifacts(&outcome, &cfg.output_dir)? {
                announce(&p);
            }
            summarize(&outcome.report);
        }
        Command::Eval { common, weight } => {
            let cfg = resolve(&common)?;
            let digest = cfg.digest();
            let (w, _) = load_weight(&weight, Some(&digest))?;
            let (cases, report) = with_jobs(common.jobs, || evaluate(&cfg, &w))??;
            let csv = cfg.output_dir.join("eval_cases.csv");
            cases_csv(&cases, &digest).save(&csv)?;
            let rep = cfg.output_dir.join("eval_report.json");
            write_json(&rep, &report)?;
            announce(&csv);
            announce(&rep);
            summarize(&report);
        }
        Command::Sweep(c) => {
            let cfg = resolve(&c)?;
            let cells = with_jobs(c.jobs, || run_sweep(&cfg))??;
            let p = cfg.output_dir.join("sweep.csv");
            sweep_csv(&cells, &cfg.digest()).save(&p)?;
            announce(&p);
        }
    }
    Ok(())
}

fn summarize(r: &harness::MetricsReport) {
    eprintln!(
        "validation cases: {}  mean NMSE: {:.4}  median NMSE: {:.4}",
        r.n_val, r.mean_nmse, r.median_nmse
    );
    if let Some(a) = r.accuracy {
        eprintln!("accuracy: {a:.4}");
    }
    if !r.failures.is_empty() {
        eprintln!("{} case(s) failed", r.failures.len());
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_validation() {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}

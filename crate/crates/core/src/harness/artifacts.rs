use std::path::Path;

use crate::circuit::{
    bifurcation_scan, integrate_sampled, power_spectrum, BifurcationPoint, CircuitState, Spectrum, Tap, Trace,
    TAP_DIODE, TAP_INDUCTOR,
};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, read_json, write_json, CsvText};
use crate::reservoir::{ReadoutWeight, StateMatrix};

use super::config::ExperimentConfig;

/// Environment variable giving the default worker count.
pub const JOBS_ENV: &str = "CHUA_RC_JOBS";

/// Run `f` on a dedicated pool of `jobs` workers, falling back to
/// [`JOBS_ENV`] and then to one worker per core.
pub fn with_jobs<T, F>(jobs: Option<usize>, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    let n = jobs
        .or_else(|| std::env::var(JOBS_ENV).ok().and_then(|v| v.parse().ok()))
        .unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::invalid("jobs", e.to_string()))?;
    Ok(pool.install(f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DigestCheck {
    Match,
    Mismatch,
    Unchecked,
}

pub fn save_weight(w: &ReadoutWeight, path: &Path) -> Result<()> {
    w.validate()?;
    write_json(path, w)
}

/// Load a weight file. When `active_digest` is given and differs from the
/// stored one a warning is logged; the weight is returned either way.
pub fn load_weight(path: &Path, active_digest: Option<&str>) -> Result<(ReadoutWeight, DigestCheck)> {
    let w: ReadoutWeight = read_json(path)?;
    w.validate()?;
    let check = match active_digest {
        None => DigestCheck::Unchecked,
        Some(d) if d == w.config_digest => DigestCheck::Match,
        Some(d) => {
            log::warn!(
                "{}: weight was trained under config {} but the active config is {}",
                path.display(),
                w.config_digest,
                d
            );
            DigestCheck::Mismatch
        }
    };
    Ok((w, check))
}

pub fn trace_csv(trace: &Trace, digest: &str) -> CsvText {
    let mut csv = CsvText::new(&format!("t,{TAP_DIODE},{TAP_INDUCTOR}"), Some(digest));
    for k in 0..trace.len() {
        csv.row([
            fmt_f64(trace.time(k)),
            fmt_f64(trace.channels[0][k]),
            fmt_f64(trace.channels[1][k]),
        ]);
    }
    csv
}

/// One row per extremum; failed points are listed as comments.
pub fn bifurcation_csv(points: &[BifurcationPoint], digest: &str) -> CsvText {
    let mut csv = CsvText::new("param,extremum_value", Some(digest));
    for p in points {
        for &e in &p.extrema {
            csv.row([fmt_f64(p.value), fmt_f64(e)]);
        }
    }
    csv
}

pub fn spectrum_csv(s: &Spectrum, digest: &str) -> CsvText {
    let mut csv = CsvText::new("freq_hz,magnitude", Some(digest));
    for (f, m) in s.freqs.iter().zip(&s.magnitudes) {
        csv.row([fmt_f64(*f), fmt_f64(*m)]);
    }
    csv
}

pub fn state_csv(m: &StateMatrix, digest: &str) -> CsvText {
    let cols: Vec<String> = (0..m.n_cols).map(|c| format!("ch_{c}")).collect();
    let mut csv = CsvText::new(&format!("t,{}", cols.join(",")), Some(digest));
    for (r, row) in m.rows().enumerate() {
        csv.row(std::iter::once(fmt_f64(m.times[r])).chain(row.iter().map(|&x| fmt_f64(x))));
    }
    csv
}

/// Trace of the configured free-running or driven simulation.
pub fn run_simulation(cfg: &ExperimentConfig) -> Result<Trace> {
    let sim = &cfg.simulation;
    sim.validate()?;
    cfg.circuit.validate()?;
    let drive = match &sim.drive {
        Some(d) => Some(d.signal(d.amplitude, sim.t_end)?),
        None => None,
    };
    integrate_sampled(
        &cfg.circuit,
        CircuitState::kick(),
        drive.as_ref(),
        sim.t_end,
        sim.dt,
        sim.record_every,
    )
}

/// Spectrum of the configured tap after the transient is dropped.
pub fn run_spectrum(cfg: &ExperimentConfig) -> Result<Spectrum> {
    let trace = run_simulation(cfg)?;
    let ch = match cfg.simulation.tap {
        Tap::Diode => &trace.channels[0],
        Tap::Inductor => &trace.channels[1],
    };
    let skip = (ch.len() as f64 * cfg.simulation.transient_fraction) as usize;
    power_spectrum(&ch[skip..], trace.dt)
}

pub fn run_bifurcation(cfg: &ExperimentConfig) -> Result<Vec<BifurcationPoint>> {
    bifurcation_scan(&cfg.bifurcation, &cfg.circuit)
}

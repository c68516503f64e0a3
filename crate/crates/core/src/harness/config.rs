use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::circuit::{BifurcationScan, ChuaParams, ScanDrive, Tap, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::lwe::LweParams;
use crate::reservoir::{ReadoutOptions, ReservoirConfig, DEFAULT_NMSE_CAP};
use crate::seed::derive_seed;
use crate::tasks::{GridSpec, TaskKind, TaskSpec};

/// Labels mixed into the master seed for each source of randomness.
pub(crate) mod label {
    pub const DATA: u64 = 1;
    pub const MASK: u64 = 2;
    pub const NOISE: u64 = 3;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// 1 MHz recording and 1000 cases: full benchmark runs in minutes.
    #[default]
    Desk,
    /// 100 MHz recording and 2900 cases.
    Full,
}

/// Free-running or driven simulation used by `simulate` and `spectrum`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub t_end: f64,
    pub dt: f64,
    /// Keep one state out of this many integration steps.
    pub record_every: usize,
    pub drive: Option<ScanDrive>,
    /// Leading share of the trace dropped before spectral analysis.
    pub transient_fraction: f64,
    pub tap: Tap,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            t_end: 40e-3,
            dt: DEFAULT_DT,
            record_every: 10,
            drive: None,
            transient_fraction: 0.5,
            tap: Tap::Diode,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::invalid("simulation.t_end", "must be > 0"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0 && self.dt < self.t_end) {
            return Err(Error::invalid("simulation.dt", "must lie in (0, t_end)"));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("simulation.record_every", "must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.transient_fraction) {
            return Err(Error::invalid("simulation.transient_fraction", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Resistance × input-window centre grid, optionally × mask count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub r_ohms: Vec<f64>,
    pub v_centers: Vec<f64>,
    /// Width `v_max − v_min` kept fixed while the centre moves.
    pub v_width: f64,
    pub n_masks: Option<Vec<usize>>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            r_ohms: (0..6).map(|i| 1600.0 + 80.0 * i as f64).collect(),
            v_centers: vec![0.4, 0.6, 0.8, 1.0, 1.2],
            v_width: 0.6,
            n_masks: None,
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        fn increasing(name: &str, v: &[f64]) -> Result<()> {
            if v.is_empty() {
                return Err(Error::invalid(format!("sweep.{name}"), "must be nonempty"));
            }
            if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(
                    format!("sweep.{name}"),
                    "must be finite and strictly increasing",
                ));
            }
            Ok(())
        }
        increasing("r_ohms", &self.r_ohms)?;
        increasing("v_centers", &self.v_centers)?;
        if !(self.v_width.is_finite() && self.v_width > 0.0) {
            return Err(Error::invalid("sweep.v_width", "must be > 0"));
        }
        if let Some(m) = &self.n_masks {
            let f: Vec<f64> = m.iter().map(|&x| x as f64).collect();
            increasing("n_masks", &f)?;
            if m[0] == 0 {
                return Err(Error::invalid("sweep.n_masks", "must be >= 1"));
            }
        }
        Ok(())
    }

    pub fn n_cells(&self) -> usize {
        self.r_ohms.len() * self.v_centers.len() * self.n_masks.as_ref().map_or(1, Vec::len)
    }
}

/// Everything one run needs. Missing JSON fields take the profile defaults.
///
/// `reservoir.value_max` and `reservoir.seed` are overwritten at run time:
/// the first follows the task's input domain, the second is derived from
/// `master_seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub profile: Profile,
    pub circuit: ChuaParams,
    pub reservoir: ReservoirConfig,
    pub readout: ReadoutOptions,
    pub task: TaskSpec,
    pub lwe: LweParams,
    pub n_cases: usize,
    pub val_fraction: f64,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub nmse_cap: f64,
    /// Decision-surface grid for classification tasks with 2-D inputs.
    pub surface: Option<GridSpec>,
    pub simulation: SimulationConfig,
    pub bifurcation: BifurcationScan,
    pub sweep: SweepGrid,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::for_profile(Profile::Desk)
    }
}

impl ExperimentConfig {
    pub fn for_profile(profile: Profile) -> Self {
        let (n_cases, sample_rate) = match profile {
            Profile::Desk => (1000, 1e6),
            Profile::Full => (2900, 100e6),
        };
        ExperimentConfig {
            profile,
            circuit: ChuaParams::default(),
            reservoir: ReservoirConfig {
                sample_rate,
                ..Default::default()
            },
            readout: ReadoutOptions::default(),
            task: TaskSpec::default(),
            lwe: LweParams::default(),
            n_cases,
            val_fraction: 0.2,
            master_seed: 0,
            output_dir: PathBuf::from("out"),
            nmse_cap: DEFAULT_NMSE_CAP,
            surface: None,
            simulation: SimulationConfig::default(),
            bifurcation: BifurcationScan::default(),
            sweep: SweepGrid::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.circuit.validate()?;
        self.reservoir.validate()?;
        self.readout.validate()?;
        self.task.validate()?;
        if matches!(self.task.kind, TaskKind::LweEncrypt | TaskKind::LweDecrypt) {
            self.lwe.validate()?;
        }
        if self.n_cases == 0 {
            return Err(Error::invalid("n_cases", "must be >= 1"));
        }
        if !(self.val_fraction > 0.0 && self.val_fraction < 1.0) {
            return Err(Error::invalid("val_fraction", "must lie in (0, 1)"));
        }
        if self.nmse_cap.is_nan() || self.nmse_cap <= 0.0 {
            return Err(Error::invalid("nmse_cap", "must be > 0"));
        }
        if let (Some(g), TaskKind::Circles) = (&self.surface, self.task.kind) {
            let r = self.task.outer_radius[1];
            let inside = |v: f64| (-r..=r).contains(&v);
            if !(inside(g.x_min) && inside(g.x_max) && inside(g.y_min) && inside(g.y_max)) {
                return Err(Error::invalid("surface", format!("grid must lie within ±{r}")));
            }
            if g.nx < 2 || g.ny < 2 {
                return Err(Error::invalid("surface", "need at least 2 points per axis"));
            }
        }
        self.simulation.validate()?;
        self.bifurcation.validate()?;
        self.sweep.validate()
    }

    /// Reservoir settings actually used for the task.
    pub fn effective_reservoir(&self) -> ReservoirConfig {
        ReservoirConfig {
            value_max: self.task.value_max(&self.lwe),
            seed: derive_seed(self.master_seed, &[label::MASK]),
            ..self.reservoir.clone()
        }
    }

    /// Hex SHA-256 of the canonical JSON form, ignoring `output_dir`.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let text = serde_json::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

/// Parse a JSON config; absent fields take the defaults of its `profile`.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_at(text, Path::new("<config>"))
}

fn parse_config_at(text: &str, path: &Path) -> Result<ExperimentConfig> {
    let json_err = |e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    };
    let user: Value = serde_json::from_str(text).map_err(json_err)?;
    if !user.is_object() {
        return Err(Error::invalid("config", "top level must be a JSON object"));
    }
    let profile: Profile = match user.get("profile") {
        Some(p) => serde_json::from_value(p.clone()).map_err(json_err)?,
        None => Profile::Desk,
    };
    let mut merged = serde_json::to_value(ExperimentConfig::for_profile(profile)).expect("config serializes");
    merge(&mut merged, user);
    let cfg: ExperimentConfig = serde_json::from_value(merged).map_err(json_err)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_at(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_must_stay_in_input_domain() {
        let base = r#"{"task": {"kind": "circles"}, "surface": "#;
        let ok = format!(r#"{base}{{"x_min": -2.5, "x_max": 2.5, "y_min": -2.5, "y_max": 2.5, "nx": 3, "ny": 3}}}}"#);
        parse_config(&ok).unwrap();
        let wide = ok.replace("-2.5, \"x_max\"", "-3, \"x_max\"");
        match parse_config(&wide) {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "surface"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_object_gives_defaults() {
        let c = parse_config("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.circuit.r_variable, 1.92e3);
        assert_eq!(c.circuit.c1, 10e-9);
        assert_eq!(c.reservoir.n_mask, 50);
        assert_eq!((c.reservoir.v_min, c.reservoir.v_max), (0.4, 1.0));
        assert_eq!(c.reservoir.n_periods, 5.0);
        assert!((c.reservoir.f_carrier - 5.8e3).abs() < 10.0);
    }

    #[test]
    fn full_profile() {
        let c = parse_config(r#"{"profile": "full", "n_cases": 10}"#).unwrap();
        assert_eq!(c.reservoir.sample_rate, 100e6);
        assert_eq!(c.reservoir.substeps().unwrap(), 1);
        assert_eq!(c.n_cases, 10);
    }

    #[test]
    fn partial_nested_override() {
        let c = parse_config(r#"{"reservoir": {"n_mask": 10}, "circuit": {"r_variable": 1800}}"#).unwrap();
        assert_eq!(c.reservoir.n_mask, 10);
        assert_eq!(c.reservoir.v_max, 1.0);
        assert_eq!(c.circuit.r_variable, 1800.0);
        assert_eq!(c.circuit.l, 18e-3);
    }

    #[test]
    fn validation_names_field() {
        match parse_config(r#"{"reservoir": {"v_min": 1.0, "v_max": 0.5}}"#) {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "reservoir.v_min"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("{"), Err(Error::Json { .. })));
        assert!(matches!(parse_config(r#"{"n_casez": 3}"#), Err(Error::Json { .. })));
    }

    #[test]
    fn roundtrip_is_idempotent() {
        let c = parse_config(r#"{"task": {"kind": "circles"}, "master_seed": 9}"#).unwrap();
        let again = parse_config(&c.to_json()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_json(), c.to_json());
        assert_eq!(again.digest(), c.digest());
    }

    #[test]
    fn sweep_sizes() {
        let g = SweepGrid::default();
        assert_eq!(g.r_ohms.len(), 6);
        assert_eq!(g.r_ohms[5], 2000.0);
        let masks = SweepGrid {
            n_masks: Some(vec![1, 10, 25, 40, 50]),
            ..g.clone()
        };
        assert_eq!(masks.n_cells(), 6 * 5 * 5);
        let lwe = SweepGrid {
            r_ohms: (0..10).map(|i| 1500.0 + 50.0 * i as f64).collect(),
            v_centers: (0..14).map(|i| 0.3 + 0.05 * i as f64).collect(),
            ..g
        };
        assert_eq!(lwe.n_cells(), 140);
    }
}

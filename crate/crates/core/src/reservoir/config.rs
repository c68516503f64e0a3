use serde::{Deserialize, Serialize};

use crate::circuit::{ChuaParams, NoiseSpec, DEFAULT_DT};
use crate::error::{Error, Result};

/// Physical taps read from the kernel: diode voltage and inductor voltage.
pub const N_TAPS: usize = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Carrier {
    /// ±1 square wave, starting high.
    #[default]
    Square,
    Sine,
    /// Constant 1: the drive is the held envelope itself.
    Dc,
}

impl Carrier {
    #[inline]
    pub fn value(self, freq: f64, t: f64) -> f64 {
        match self {
            Carrier::Square => {
                if (freq * t).fract() < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
            Carrier::Sine => (2.0 * std::f64::consts::PI * freq * t).sin(),
            Carrier::Dc => 1.0,
        }
    }
}

/// Carrier frequency `ω / (2π·R·C1)` with the normalized `ω = 0.7`.
pub fn resonant_carrier(circuit: &ChuaParams) -> f64 {
    0.7 / (2.0 * std::f64::consts::PI * circuit.r_variable * circuit.c1)
}

/// Parameters of the input pre-processing and output post-processing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReservoirConfig {
    pub v_min: f64,
    pub v_max: f64,
    /// Largest raw input value; maps to `v_max`.
    pub value_max: f64,
    pub n_mask: usize,
    pub mask_deviation: f64,
    /// Sample-hold length, in envelope points.
    pub theta: usize,
    pub carrier: Carrier,
    pub f_carrier: f64,
    pub n_periods: f64,
    /// Rate of both the drive samples and the recorded taps.
    pub sample_rate: f64,
    pub n_taps: usize,
    pub middle_fraction: f64,
    pub use_envelope: bool,
    /// Integration step; must divide `1 / sample_rate`.
    pub sim_dt: f64,
    pub noise: Option<NoiseSpec>,
    pub seed: u64,
}

impl Default for ReservoirConfig {
    fn default() -> Self {
        ReservoirConfig {
            v_min: 0.4,
            v_max: 1.0,
            value_max: 1.0,
            n_mask: 50,
            mask_deviation: 0.01,
            theta: 10,
            carrier: Carrier::Square,
            f_carrier: resonant_carrier(&ChuaParams::default()),
            n_periods: 5.0,
            sample_rate: 1e6,
            n_taps: N_TAPS,
            middle_fraction: 0.8,
            use_envelope: false,
            sim_dt: DEFAULT_DT,
            noise: None,
            seed: 0,
        }
    }
}

impl ReservoirConfig {
    pub fn n_channels(&self) -> usize {
        self.n_mask * self.n_taps
    }

    pub fn duration(&self) -> f64 {
        self.n_periods / self.f_carrier
    }

    /// Number of recorded samples over the drive duration.
    pub fn n_samples(&self) -> usize {
        (self.duration() * self.sample_rate).round() as usize
    }

    /// Integration steps per recorded sample.
    pub fn substeps(&self) -> Result<usize> {
        let ratio = 1.0 / (self.sample_rate * self.sim_dt);
        let r = ratio.round();
        if r < 1.0 || (ratio - r).abs() > 1e-6 * r {
            return Err(Error::invalid(
                "reservoir.sim_dt",
                format!("1/sample_rate must be an integer multiple of sim_dt (ratio {ratio})"),
            ));
        }
        Ok(r as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("reservoir.{name}"), "must be finite and > 0"))
            }
        };
        if !(self.v_min.is_finite() && self.v_max.is_finite() && self.v_min < self.v_max) {
            return Err(Error::invalid("reservoir.v_min", "need v_min < v_max"));
        }
        finite_pos("value_max", self.value_max)?;
        finite_pos("f_carrier", self.f_carrier)?;
        finite_pos("n_periods", self.n_periods)?;
        finite_pos("sample_rate", self.sample_rate)?;
        finite_pos("sim_dt", self.sim_dt)?;
        if self.n_mask == 0 {
            return Err(Error::invalid("reservoir.n_mask", "must be >= 1"));
        }
        if self.theta == 0 {
            return Err(Error::invalid("reservoir.theta", "must be >= 1"));
        }
        if self.n_taps != N_TAPS {
            return Err(Error::invalid("reservoir.n_taps", "the kernel exposes exactly 2 taps"));
        }
        if !(0.0..1.0).contains(&self.mask_deviation) {
            return Err(Error::invalid("reservoir.mask_deviation", "must lie in [0, 1)"));
        }
        if !(self.middle_fraction > 0.0 && self.middle_fraction <= 1.0) {
            return Err(Error::invalid("reservoir.middle_fraction", "must lie in (0, 1]"));
        }
        if self.sample_rate < 2.0 * self.f_carrier {
            return Err(Error::invalid(
                "reservoir.sample_rate",
                "must be at least twice the carrier frequency",
            ));
        }
        if let Some(n) = &self.noise {
            n.validate()?;
        }
        self.substeps()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_carrier_near_5_8_khz() {
        let f = ReservoirConfig::default().f_carrier;
        assert!((f - 5.8e3).abs() < 10.0, "{f}");
        let c = ReservoirConfig::default();
        assert_eq!(c.n_channels(), 100);
        assert_eq!(c.substeps().unwrap(), 100);
        c.validate().unwrap();
    }

    #[test]
    fn square_carrier_levels() {
        assert_eq!(Carrier::Square.value(1e3, 0.0), 1.0);
        assert_eq!(Carrier::Square.value(1e3, 0.6e-3), -1.0);
        assert_eq!(Carrier::Dc.value(1e3, 0.6e-3), 1.0);
    }

    #[test]
    fn validation_names_fields() {
        let c = ReservoirConfig {
            v_min: 1.0,
            v_max: 0.5,
            ..Default::default()
        };
        match c.validate() {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "reservoir.v_min"),
            other => panic!("{other:?}"),
        }
        let c = ReservoirConfig {
            sample_rate: 5e3,
            sim_dt: 1e-6,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = ReservoirConfig {
            sim_dt: 3e-7,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}

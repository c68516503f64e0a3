//! Steady-state extrema of a tap as one circuit or drive parameter is swept.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ode::{inductor_tap, integrate_with, ChuaParams, CircuitState, DriveSignal, DEFAULT_DT};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanParameter {
    RVariable,
    C1,
    DriveAmplitude,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tap {
    #[default]
    Diode,
    Inductor,
}

/// Periodic drive used during a scan. `amplitude` is ignored when the scan
/// varies the amplitude itself.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanDrive {
    pub shape: Waveform,
    pub freq: f64,
    pub amplitude: f64,
    pub sample_rate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Waveform {
    Sine,
    Square,
}

impl ScanDrive {
    pub fn sine(freq: f64) -> Self {
        ScanDrive {
            shape: Waveform::Sine,
            freq,
            amplitude: 0.0,
            sample_rate: 1e6,
        }
    }

    /// Sampled drive of the given amplitude lasting `duration` seconds.
    pub fn signal(&self, amplitude: f64, duration: f64) -> Result<DriveSignal> {
        match self.shape {
            Waveform::Sine => DriveSignal::sine(amplitude, self.freq, self.sample_rate, duration),
            Waveform::Square => {
                let n = (duration * self.sample_rate).round().max(1.0) as usize;
                let samples = (0..n)
                    .map(|i| {
                        let phase = (self.freq * i as f64 / self.sample_rate).fract();
                        if phase < 0.5 {
                            amplitude
                        } else {
                            -amplitude
                        }
                    })
                    .collect();
                DriveSignal::new(samples, self.sample_rate)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BifurcationScan {
    pub vary: ScanParameter,
    pub start: f64,
    pub end: f64,
    pub steps: usize,
    pub tap: Tap,
    pub drive: Option<ScanDrive>,
    /// Defaults to 40 ms undriven or 20 carrier periods driven.
    pub horizon: Option<f64>,
    pub transient_fraction: f64,
    pub dt: f64,
    pub init: CircuitState,
}

impl Default for BifurcationScan {
    /// Undriven resistance sweep across the chaotic window.
    fn default() -> Self {
        Self::new(ScanParameter::RVariable, 1.4e3, 2.1e3, 36)
    }
}

impl BifurcationScan {
    pub fn new(vary: ScanParameter, start: f64, end: f64, steps: usize) -> Self {
        BifurcationScan {
            vary,
            start,
            end,
            steps,
            tap: Tap::Diode,
            drive: None,
            horizon: None,
            transient_fraction: 0.5,
            dt: DEFAULT_DT,
            init: CircuitState::kick(),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let span = self.end - self.start;
        (0..self.steps)
            .map(|i| self.start + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }

    pub fn horizon(&self) -> f64 {
        match (self.horizon, &self.drive) {
            (Some(h), _) => h,
            (None, Some(d)) => 20.0 / d.freq,
            (None, None) => 40e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::invalid("bifurcation.steps", "need at least 2 points"));
        }
        if !(self.start.is_finite() && self.end.is_finite()) || self.start == self.end {
            return Err(Error::invalid("bifurcation.range", "must be finite and non-degenerate"));
        }
        if !(0.0..1.0).contains(&self.transient_fraction) {
            return Err(Error::invalid("bifurcation.transient_fraction", "must lie in [0, 1)"));
        }
        if self.vary == ScanParameter::DriveAmplitude && self.drive.is_none() {
            return Err(Error::invalid("bifurcation.drive", "amplitude scans need a drive"));
        }
        if let Some(d) = &self.drive {
            if !(d.freq > 0.0 && d.sample_rate >= 2.0 * d.freq) {
                return Err(Error::invalid(
                    "bifurcation.drive",
                    "need freq > 0 and sample_rate >= 2 freq",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BifurcationPoint {
    pub value: f64,
    pub extrema: Vec<f64>,
    /// Set when the integration at this value failed; `extrema` is then empty.
    pub failure: Option<String>,
}

impl BifurcationPoint {
    /// `max − min` of the extrema, zero for a single point or a failed run.
    pub fn spread(&self) -> f64 {
        spread(&self.extrema)
    }
}

pub fn spread(values: &[f64]) -> f64 {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

/// Strict local maxima and minima over three-sample windows, streamed.
#[derive(Default)]
struct ExtremaCollector {
    prev2: Option<f64>,
    prev1: Option<f64>,
    found: Vec<f64>,
}

impl ExtremaCollector {
    fn push(&mut self, x: f64) {
        if let (Some(a), Some(b)) = (self.prev2, self.prev1) {
            if (b > a && b > x) || (b < a && b < x) {
                self.found.push(b);
            }
        }
        self.prev2 = self.prev1;
        self.prev1 = Some(x);
    }

    fn finish(self) -> Vec<f64> {
        if self.found.is_empty() {
            // A monotone settle onto a fixed point has no strict extrema; the
            // final value stands in for the equilibrium.
            self.prev1.into_iter().collect()
        } else {
            self.found
        }
    }
}

/// Strict local extrema of a stored sequence (same rule as the scan).
pub fn local_extrema(xs: &[f64]) -> Vec<f64> {
    let mut c = ExtremaCollector::default();
    for &x in xs {
        c.push(x);
    }
    c.finish()
}

fn scan_point(scan: &BifurcationScan, fixed: &ChuaParams, value: f64) -> Result<Vec<f64>> {
    let mut params = *fixed;
    let mut amplitude = scan.drive.map_or(0.0, |d| d.amplitude);
    match scan.vary {
        ScanParameter::RVariable => params.r_variable = value,
        ScanParameter::C1 => params.c1 = value,
        ScanParameter::DriveAmplitude => amplitude = value,
    }
    params.validate()?;
    let horizon = scan.horizon();
    let drive = scan.drive.map(|d| d.signal(amplitude, horizon)).transpose()?;
    let n_steps = (horizon / scan.dt).round() as usize;
    let skip = (n_steps as f64 * scan.transient_fraction).floor() as usize;
    let mut collector = ExtremaCollector::default();
    integrate_with(&params, scan.init, drive.as_ref(), horizon, scan.dt, |step, s, v_in| {
        if step > skip {
            let x = match scan.tap {
                Tap::Diode => s.v_c1,
                Tap::Inductor => inductor_tap(s, &params, v_in),
            };
            collector.push(x);
        }
    })?;
    Ok(collector.finish())
}

/// Run the scan. Points are evaluated in parallel and returned in parameter
/// order; a failed point is flagged and the scan continues.
pub fn bifurcation_scan(scan: &BifurcationScan, fixed: &ChuaParams) -> Result<Vec<BifurcationPoint>> {
    scan.validate()?;
    Ok(scan
        .values()
        .into_par_iter()
        .map(|value| match scan_point(scan, fixed, value) {
            Ok(extrema) => BifurcationPoint {
                value,
                extrema,
                failure: None,
            },
            Err(e) => BifurcationPoint {
                value,
                extrema: Vec::new(),
                failure: Some(e.to_string()),
            },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrema_rule() {
        let xs = [0.0, 1.0, 0.5, 0.5, 2.0, -1.0, 3.0];
        // 1.0 is a strict max; the flat 0.5 pair is not an extremum; 2.0 max; -1.0 min.
        assert_eq!(local_extrema(&xs), vec![1.0, 2.0, -1.0]);
        assert_eq!(local_extrema(&[1.0, 2.0, 3.0]), vec![3.0]);
    }

    #[test]
    fn values_are_inclusive() {
        let s = BifurcationScan::new(ScanParameter::RVariable, 1.6e3, 2.0e3, 6);
        let v = s.values();
        assert_eq!(v.len(), 6);
        assert_eq!(v[0], 1.6e3);
        assert_eq!(v[5], 2.0e3);
        assert!((v[1] - 1.68e3).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_scans() {
        let p = ChuaParams::default();
        let s = BifurcationScan::new(ScanParameter::RVariable, 1.6e3, 2.0e3, 1);
        assert!(bifurcation_scan(&s, &p).is_err());
        let s = BifurcationScan::new(ScanParameter::DriveAmplitude, 0.0, 1.0, 3);
        assert!(bifurcation_scan(&s, &p).is_err());
    }

    #[test]
    fn failed_points_are_flagged() {
        let p = ChuaParams::default();
        // A negative capacitance fails validation for that point only.
        let mut s = BifurcationScan::new(ScanParameter::C1, -1e-9, 10e-9, 2);
        s.horizon = Some(1e-5);
        let out = bifurcation_scan(&s, &p).unwrap();
        assert!(out[0].failure.is_some());
        assert!(out[1].failure.is_none());
    }
}

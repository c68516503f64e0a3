//! State equations of the driven Chua circuit and a fixed-step RK4 integrator.

use serde::{Deserialize, Serialize};

use super::diode::DiodePwl;
use crate::error::{Error, Result};

/// Simulation step matching a 100 MHz circuit-solver setting.
pub const DEFAULT_DT: f64 = 10e-9;

pub const TAP_DIODE: &str = "v_cd";
pub const TAP_INDUCTOR: &str = "v_l";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChuaParams {
    /// The tuning resistor between the two capacitors.
    pub r_variable: f64,
    pub c1: f64,
    pub c2: f64,
    pub l: f64,
    /// Series resistance of the inductor winding.
    pub r_series: f64,
    pub diode: DiodePwl,
}

impl Default for ChuaParams {
    fn default() -> Self {
        ChuaParams {
            r_variable: 1.92e3,
            c1: 10e-9,
            c2: 100e-9,
            l: 18e-3,
            r_series: 17.0,
            diode: DiodePwl::default(),
        }
    }
}

impl ChuaParams {
    pub fn with_resistance(mut self, r: f64) -> Self {
        self.r_variable = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("circuit.r_variable", self.r_variable),
            ("circuit.c1", self.c1),
            ("circuit.c2", self.c2),
            ("circuit.l", self.l),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(name, "must be finite and > 0"));
            }
        }
        if !(self.r_series.is_finite() && self.r_series >= 0.0) {
            return Err(Error::invalid("circuit.r_series", "must be finite and >= 0"));
        }
        self.diode.validate()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CircuitState {
    pub i_l: f64,
    pub v_c2: f64,
    pub v_c1: f64,
}

impl CircuitState {
    /// Slightly off the origin so undriven runs leave the unstable fixed point.
    pub fn kick() -> Self {
        CircuitState {
            i_l: 0.0,
            v_c2: 0.0,
            v_c1: 0.1,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.i_l.is_finite() && self.v_c2.is_finite() && self.v_c1.is_finite()
    }

    fn axpy(self, h: f64, d: CircuitState) -> CircuitState {
        CircuitState {
            i_l: self.i_l + h * d.i_l,
            v_c2: self.v_c2 + h * d.v_c2,
            v_c1: self.v_c1 + h * d.v_c1,
        }
    }
}

/// Uniformly sampled voltage source placed in series with the inductor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveSignal {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
}

impl DriveSignal {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("drive.samples", "must be nonempty"));
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::invalid("drive.sample_rate", "must be > 0"));
        }
        Ok(DriveSignal { samples, sample_rate })
    }

    /// `amplitude · sin(2π f t)` over `duration` seconds.
    pub fn sine(amplitude: f64, freq: f64, sample_rate: f64, duration: f64) -> Result<Self> {
        let n = (duration * sample_rate).round().max(1.0) as usize;
        let w = 2.0 * std::f64::consts::PI * freq;
        let samples = (0..n).map(|i| amplitude * (w * i as f64 / sample_rate).sin()).collect();
        Self::new(samples, sample_rate)
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Multi-tap voltage record. Sample `k` is taken at `t0 + k·dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub dt: f64,
    pub t0: f64,
    pub tap_names: Vec<String>,
    pub channels: Vec<Vec<f64>>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn tap(&self, name: &str) -> Option<&[f64]> {
        self.tap_names
            .iter()
            .position(|t| t == name)
            .map(|i| self.channels[i].as_slice())
    }
}

/// Time derivatives `(dI_L/dt, dV_C2/dt, dV_C1/dt)`.
///
/// The drive enters the inductor branch only:
/// `L·dI_L/dt = −V_C2 − r_series·I_L − v_in`.
#[inline]
pub fn derivatives(s: CircuitState, p: &ChuaParams, v_in: f64) -> CircuitState {
    Rhs::new(p).eval(s, v_in)
}

/// Right-hand side with the component reciprocals hoisted out of the loop.
#[derive(Clone, Copy)]
struct Rhs {
    inv_l: f64,
    inv_c1: f64,
    inv_c2: f64,
    inv_r: f64,
    r_series: f64,
    diode: DiodePwl,
}

impl Rhs {
    fn new(p: &ChuaParams) -> Self {
        Rhs {
            inv_l: 1.0 / p.l,
            inv_c1: 1.0 / p.c1,
            inv_c2: 1.0 / p.c2,
            inv_r: 1.0 / p.r_variable,
            r_series: p.r_series,
            diode: p.diode,
        }
    }

    #[inline(always)]
    fn eval(&self, s: CircuitState, v_in: f64) -> CircuitState {
        let coupling = (s.v_c2 - s.v_c1) * self.inv_r;
        CircuitState {
            i_l: (-s.v_c2 - self.r_series * s.i_l - v_in) * self.inv_l,
            v_c2: (s.i_l - coupling) * self.inv_c2,
            v_c1: (coupling - self.diode.current(s.v_c1)) * self.inv_c1,
        }
    }

    #[inline(always)]
    fn rk4(&self, s: CircuitState, v_in: f64, h: f64) -> CircuitState {
        let k1 = self.eval(s, v_in);
        let k2 = self.eval(s.axpy(0.5 * h, k1), v_in);
        let k3 = self.eval(s.axpy(0.5 * h, k2), v_in);
        let k4 = self.eval(s.axpy(h, k3), v_in);
        let w = h / 6.0;
        CircuitState {
            i_l: s.i_l + w * (k1.i_l + 2.0 * k2.i_l + 2.0 * k3.i_l + k4.i_l),
            v_c2: s.v_c2 + w * (k1.v_c2 + 2.0 * k2.v_c2 + 2.0 * k3.v_c2 + k4.v_c2),
            v_c1: s.v_c1 + w * (k1.v_c1 + 2.0 * k2.v_c1 + 2.0 * k3.v_c1 + k4.v_c1),
        }
    }
}

/// Voltage across the inductor terminals in the reported tap convention.
#[inline]
pub fn inductor_tap(s: &CircuitState, p: &ChuaParams, v_in: f64) -> f64 {
    s.v_c2 - p.r_series * s.i_l - v_in
}

/// Zero-order-hold lookup of the drive for integration step `step`.
struct DriveHold<'a> {
    drive: Option<&'a DriveSignal>,
    steps_per_sample: Option<usize>,
    dt: f64,
}

impl<'a> DriveHold<'a> {
    fn new(drive: Option<&'a DriveSignal>, dt: f64) -> Self {
        let steps_per_sample = drive.and_then(|d| {
            let ratio = 1.0 / (d.sample_rate * dt);
            let r = ratio.round();
            ((ratio - r).abs() < 1e-9 * r.max(1.0) && r >= 1.0).then_some(r as usize)
        });
        DriveHold {
            drive,
            steps_per_sample,
            dt,
        }
    }

    #[inline]
    fn at(&self, step: usize) -> f64 {
        let Some(d) = self.drive else { return 0.0 };
        let idx = match self.steps_per_sample {
            Some(n) => step / n,
            None => ((step as f64 * self.dt) * d.sample_rate + 1e-9).floor() as usize,
        };
        // The source is switched off after its last sample.
        d.samples.get(idx).copied().unwrap_or(0.0)
    }
}

/// Drive the RK4 loop for `round(t_end / dt)` steps, calling `visit` with the
/// 1-based step index, the new state and the drive value held over the step.
/// Stops at the first non-finite state.
pub fn integrate_with<F>(
    p: &ChuaParams,
    init: CircuitState,
    drive: Option<&DriveSignal>,
    t_end: f64,
    dt: f64,
    mut visit: F,
) -> Result<CircuitState>
where
    F: FnMut(usize, &CircuitState, f64),
{
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("integrator.dt", "must be > 0"));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::invalid("integrator.t_end", "must be >= 0"));
    }
    let n_steps = (t_end / dt).round() as usize;
    let hold = DriveHold::new(drive, dt);
    let rhs = Rhs::new(p);
    let mut s = init;
    for step in 0..n_steps {
        let v_in = hold.at(step);
        s = rhs.rk4(s, v_in, dt);
        if !s.is_finite() {
            return Err(Error::Integration {
                step: step + 1,
                time: (step + 1) as f64 * dt,
            });
        }
        visit(step + 1, &s, v_in);
    }
    Ok(s)
}

/// Fixed-step RK4 integration over `[0, t_end]`, recording every step.
pub fn integrate(
    p: &ChuaParams,
    init: CircuitState,
    drive: Option<&DriveSignal>,
    t_end: f64,
    dt: f64,
) -> Result<Trace> {
    integrate_sampled(p, init, drive, t_end, dt, 1)
}

/// Like [`integrate`] but only records the state after every
/// `record_every` steps, so the trace starts at `record_every·dt`.
pub fn integrate_sampled(
    p: &ChuaParams,
    init: CircuitState,
    drive: Option<&DriveSignal>,
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> Result<Trace> {
    if record_every == 0 {
        return Err(Error::invalid("integrator.record_every", "must be >= 1"));
    }
    let n_steps = if dt > 0.0 { (t_end / dt).round() as usize } else { 0 };
    let n_records = n_steps / record_every;
    let mut v_cd = Vec::with_capacity(n_records);
    let mut v_l = Vec::with_capacity(n_records);
    let horizon = (n_records * record_every) as f64 * dt;
    integrate_with(p, init, drive, horizon, dt, |step, s, v_in| {
        if step % record_every == 0 {
            v_cd.push(s.v_c1);
            v_l.push(inductor_tap(s, p, v_in));
        }
    })?;
    let rec_dt = dt * record_every as f64;
    Ok(Trace {
        dt: rec_dt,
        t0: rec_dt,
        tap_names: vec![TAP_DIODE.into(), TAP_INDUCTOR.into()],
        channels: vec![v_cd, v_l],
    })
}

/// Integrate and return only the final state (used by convergence checks).
pub fn final_state(
    p: &ChuaParams,
    init: CircuitState,
    drive: Option<&DriveSignal>,
    t_end: f64,
    dt: f64,
) -> Result<CircuitState> {
    integrate_with(p, init, drive, t_end, dt, |_, _, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_equilibrium() {
        let p = ChuaParams::default();
        let d = derivatives(CircuitState::default(), &p, 0.0);
        assert_eq!(d, CircuitState::default());
        let tr = integrate(&p, CircuitState::default(), None, 1e-4, 1e-7).unwrap();
        assert_eq!(tr.len(), 1000);
        assert!(tr.channels.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn c1_scaling() {
        let p = ChuaParams::default();
        let q = ChuaParams { c1: 2.0 * p.c1, ..p };
        let s = CircuitState {
            i_l: 1e-4,
            v_c2: 0.3,
            v_c1: -0.7,
        };
        let a = derivatives(s, &p, 0.0).v_c1;
        let b = derivatives(s, &q, 0.0).v_c1;
        assert!((a - 2.0 * b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn drive_only_touches_inductor_equation() {
        let p = ChuaParams::default();
        let s = CircuitState::kick();
        let a = derivatives(s, &p, 0.0);
        let b = derivatives(s, &p, 0.5);
        assert_eq!(a.v_c1, b.v_c1);
        assert_eq!(a.v_c2, b.v_c2);
        assert!((a.i_l - b.i_l - 0.5 / p.l).abs() < 1e-9);
    }

    #[test]
    fn record_every_decimates() {
        let p = ChuaParams::default();
        let full = integrate(&p, CircuitState::kick(), None, 1e-5, 1e-8).unwrap();
        let dec = integrate_sampled(&p, CircuitState::kick(), None, 1e-5, 1e-8, 10).unwrap();
        assert_eq!(dec.len(), full.len() / 10);
        for k in 0..dec.len() {
            assert_eq!(dec.channels[0][k], full.channels[0][10 * k + 9]);
        }
        assert!((dec.dt - 1e-7).abs() < 1e-20);
    }

    #[test]
    fn divergence_is_reported() {
        let p = ChuaParams::default();
        let bad = CircuitState {
            i_l: f64::NAN,
            ..Default::default()
        };
        match integrate(&p, bad, None, 1e-6, 1e-8) {
            Err(Error::Integration { step, .. }) => assert_eq!(step, 1),
            other => panic!("expected integration error, got {other:?}"),
        }
    }

    #[test]
    fn validation() {
        assert!(ChuaParams::default().validate().is_ok());
        let p = ChuaParams {
            c2: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        assert!(DriveSignal::new(vec![], 1e6).is_err());
        assert!(DriveSignal::new(vec![1.0], 0.0).is_err());
    }
}

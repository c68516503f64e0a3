//! One case end to end: raw values in, demultiplexed activations out.

use super::config::ReservoirConfig;
use super::input::{make_mask, modulate, multiplex, normalize, sample_hold};
use super::output::{demultiplex, envelope_extract, SlotLayout, StateMatrix};
use crate::circuit::{
    inject_noise, integrate_sampled, ChuaParams, CircuitState, DriveSignal, Trace, TAP_DIODE, TAP_INDUCTOR,
};
use crate::error::Result;

/// Padding value appended after the message so the last real value is
/// followed by a settled slot.
pub const DUMMY_VALUE: f64 = 0.0;

/// Build the drive for `raw` (dummy already appended by the caller).
pub fn build_drive(raw_with_dummy: &[f64], cfg: &ReservoirConfig) -> Result<DriveSignal> {
    let volts = normalize(raw_with_dummy, cfg)?;
    let mask = make_mask(cfg);
    let envelope = sample_hold(&multiplex(&volts, &mask)?, cfg.theta)?;
    let drive = modulate(&envelope, cfg)?;
    match &cfg.noise {
        Some(n) => inject_noise(&drive, n),
        None => Ok(drive),
    }
}

/// Run `raw` through the Chua kernel and demultiplex the taps.
pub fn run_case(raw: &[f64], cfg: &ReservoirConfig, circuit: &ChuaParams) -> Result<StateMatrix> {
    circuit.validate()?;
    let substeps = cfg.substeps()?;
    run_case_with(raw, cfg, |drive| {
        let t_end = drive.len() as f64 * substeps as f64 * cfg.sim_dt;
        integrate_sampled(circuit, CircuitState::kick(), Some(drive), t_end, cfg.sim_dt, substeps)
    })
}

/// Same as [`run_case`] with the kernel supplied by the caller. `kernel`
/// must return one recorded sample per drive sample.
pub fn run_case_with<K>(raw: &[f64], cfg: &ReservoirConfig, kernel: K) -> Result<StateMatrix>
where
    K: FnOnce(&DriveSignal) -> Result<Trace>,
{
    cfg.validate()?;
    let mut values = raw.to_vec();
    values.push(DUMMY_VALUE);
    let drive = build_drive(&values, cfg)?;
    let mut trace = kernel(&drive)?;
    if cfg.use_envelope {
        let window = ((cfg.sample_rate / (2.0 * cfg.f_carrier)).round() as usize).max(1);
        for ch in &mut trace.channels {
            *ch = envelope_extract(ch, window)?.0;
        }
    }
    let layout = SlotLayout {
        n_values: values.len(),
        n_dummy: 1,
        n_mask: cfg.n_mask,
        n_samples: drive.len(),
    };
    demultiplex(&trace, &layout, cfg.middle_fraction)
}

/// Kernel that reports the drive itself on both taps.
pub fn passthrough_kernel(drive: &DriveSignal) -> Result<Trace> {
    let dt = 1.0 / drive.sample_rate;
    Ok(Trace {
        dt,
        t0: dt,
        tap_names: vec![TAP_DIODE.into(), TAP_INDUCTOR.into()],
        channels: vec![drive.samples.clone(), drive.samples.clone()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reservoir::config::Carrier;

    fn identity_cfg() -> ReservoirConfig {
        ReservoirConfig {
            n_mask: 1,
            mask_deviation: 0.0,
            theta: 1,
            carrier: Carrier::Dc,
            middle_fraction: 1.0,
            value_max: 6.0,
            f_carrier: 1e3,
            n_periods: 1.0,
            sample_rate: 1e5,
            sim_dt: 1e-7,
            ..Default::default()
        }
    }

    #[test]
    fn identity_pipeline_returns_normalized_message() {
        let cfg = identity_cfg();
        let raw = [0.0, 3.0, 6.0, 1.5];
        let m = run_case_with(&raw, &cfg, passthrough_kernel).unwrap();
        let expected = normalize(&raw, &cfg).unwrap();
        let per_value = m.n_rows / raw.len();
        assert_eq!(per_value * raw.len(), m.n_rows);
        for (r, row) in m.rows().enumerate() {
            assert_eq!(row[0], expected[r / per_value]);
            assert_eq!(row[1], expected[r / per_value]);
        }
    }

    #[test]
    fn chua_case_shape_and_determinism() {
        let cfg = ReservoirConfig {
            n_mask: 10,
            value_max: 3.0,
            ..Default::default()
        };
        let p = ChuaParams::default();
        let a = run_case(&[1.2], &cfg, &p).unwrap();
        let b = run_case(&[1.2], &cfg, &p).unwrap();
        assert_eq!(a.n_cols, 20);
        assert!(a.n_rows > 0);
        assert_eq!(a, b);
        assert!(a.data.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn out_of_domain_input() {
        let cfg = identity_cfg();
        assert!(run_case_with(&[7.0], &cfg, passthrough_kernel).is_err());
    }
}

//! Input side: normalization, mask multiplexing, sample hold and amplitude
//! modulation of a carrier.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ReservoirConfig;
use crate::circuit::DriveSignal;
use crate::error::{Error, Result};

/// Map raw values in `[0, value_max]` linearly onto `[v_min, v_max]`.
pub fn normalize(values: &[f64], cfg: &ReservoirConfig) -> Result<Vec<f64>> {
    let span = cfg.v_max - cfg.v_min;
    values
        .iter()
        .map(|&x| {
            if !(0.0..=cfg.value_max).contains(&x) {
                return Err(Error::InputDomain {
                    value: x,
                    max: cfg.value_max,
                });
            }
            Ok(cfg.v_min + x / cfg.value_max * span)
        })
        .collect()
}

pub fn denormalize(volts: &[f64], cfg: &ReservoirConfig) -> Vec<f64> {
    let span = cfg.v_max - cfg.v_min;
    volts.iter().map(|&v| (v - cfg.v_min) / span * cfg.value_max).collect()
}

/// Multiplicative per-slot factors in `[1 − d, 1 + d]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mask {
    pub factors: Vec<f64>,
}

impl Mask {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

pub fn make_mask(cfg: &ReservoirConfig) -> Mask {
    let d = cfg.mask_deviation;
    if d == 0.0 {
        return Mask {
            factors: vec![1.0; cfg.n_mask],
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Mask {
        factors: (0..cfg.n_mask).map(|_| rng.random_range(1.0 - d..=1.0 + d)).collect(),
    }
}

/// Value-major multiplexing: each message value is followed by its
/// `n_mask` masked copies before the next value starts.
pub fn multiplex(message: &[f64], mask: &Mask) -> Result<Vec<f64>> {
    if message.is_empty() {
        return Err(Error::invalid("message", "must be nonempty"));
    }
    Ok(message
        .iter()
        .flat_map(|&m| mask.factors.iter().map(move |&f| m * f))
        .collect())
}

pub fn sample_hold(seq: &[f64], theta: usize) -> Result<Vec<f64>> {
    if theta == 0 {
        return Err(Error::invalid("reservoir.theta", "must be >= 1"));
    }
    Ok(seq.iter().flat_map(|&x| std::iter::repeat_n(x, theta)).collect())
}

/// Envelope point that governs recorded sample `i` when `n_points` envelope
/// points are spread evenly over `n_samples` samples.
#[inline]
pub(crate) fn point_of_sample(i: usize, n_points: usize, n_samples: usize) -> usize {
    ((i as u128 * n_points as u128) / n_samples as u128) as usize
}

/// Spread the envelope over `n_periods / f_carrier` seconds in equal-duration
/// slots and multiply by the carrier.
pub fn modulate(envelope: &[f64], cfg: &ReservoirConfig) -> Result<DriveSignal> {
    if envelope.is_empty() {
        return Err(Error::invalid("envelope", "must be nonempty"));
    }
    if cfg.sample_rate < 2.0 * cfg.f_carrier {
        return Err(Error::invalid(
            "reservoir.sample_rate",
            "must be at least twice the carrier frequency",
        ));
    }
    let n = cfg.n_samples();
    if n == 0 {
        return Err(Error::invalid("reservoir.n_periods", "drive has no samples"));
    }
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / cfg.sample_rate;
            envelope[point_of_sample(i, envelope.len(), n)] * cfg.carrier.value(cfg.f_carrier, t)
        })
        .collect();
    DriveSignal::new(samples, cfg.sample_rate)
}

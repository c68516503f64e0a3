//! White-noise injection on drive signals and SNR measurement.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::ode::DriveSignal;
use crate::error::{Error, Result};

/// Input-referred noise densities integrated over `bandwidth`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// V/√Hz
    pub voltage_density: f64,
    /// A/√Hz. Carried for completeness; a voltage drive has no current path.
    pub current_density: f64,
    pub bandwidth: f64,
    pub seed: u64,
}

impl NoiseSpec {
    /// Function-generator figures: 6.6 nV/√Hz, 0.6 fA/√Hz over 10 kHz.
    pub fn generator(seed: u64) -> Self {
        NoiseSpec {
            voltage_density: 6.6e-9,
            current_density: 0.6e-15,
            bandwidth: 10e3,
            seed,
        }
    }

    /// Op-amp figures: 22 nV/√Hz, 0.01 pA/√Hz over 10 kHz.
    pub fn op_amp(seed: u64) -> Self {
        NoiseSpec {
            voltage_density: 22e-9,
            current_density: 0.01e-12,
            bandwidth: 10e3,
            seed,
        }
    }

    pub fn voltage_rms(&self) -> f64 {
        self.voltage_density * self.bandwidth.sqrt()
    }

    pub fn current_rms(&self) -> f64 {
        self.current_density * self.bandwidth.sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.voltage_density >= 0.0 && self.current_density >= 0.0) {
            return Err(Error::invalid("reservoir.noise.voltage_density", "must be >= 0"));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(Error::invalid("reservoir.noise.bandwidth", "must be > 0"));
        }
        Ok(())
    }
}

/// Add white Gaussian voltage noise with RMS `voltage_density·√bandwidth`.
pub fn inject_noise(signal: &DriveSignal, noise: &NoiseSpec) -> Result<DriveSignal> {
    noise.validate()?;
    let rms = noise.voltage_rms();
    if rms == 0.0 {
        return Ok(signal.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let normal = Normal::new(0.0, rms).expect("rms is finite and positive");
    let samples = signal.samples.iter().map(|&x| x + normal.sample(&mut rng)).collect();
    DriveSignal::new(samples, signal.sample_rate)
}

/// `10·log10(P_signal / P_noise)` with the noise taken as `noisy − clean`.
/// Returns `f64::INFINITY` when the two are identical.
pub fn snr_db(clean: &[f64], noisy: &[f64]) -> Result<f64> {
    if clean.len() != noisy.len() {
        return Err(Error::Dimension {
            expected: clean.len(),
            found: noisy.len(),
        });
    }
    let signal: f64 = clean.iter().map(|x| x * x).sum();
    let noise: f64 = clean.iter().zip(noisy).map(|(c, n)| (n - c).powi(2)).sum();
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / noise).log10())
}

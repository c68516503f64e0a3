use rustfft::{num_complex::Complex64, FftPlanner};

use crate::error::{Error, Result};

/// One-sided DFT magnitude spectrum of a mean-removed channel.
///
/// `magnitudes[k]` is `|X_k|` for `k = 0..=n/2` (unnormalized DFT), at
/// frequency `k / (n·dt)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub n: usize,
    pub bin_width: f64,
    pub freqs: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

impl Spectrum {
    /// Σ|x_t|² recovered from the one-sided magnitudes (Parseval).
    pub fn total_power(&self) -> f64 {
        let last = self.magnitudes.len() - 1;
        let mut acc = 0.0;
        for (k, m) in self.magnitudes.iter().enumerate() {
            let mirrored = k != 0 && !(self.n.is_multiple_of(2) && k == last);
            acc += if mirrored { 2.0 } else { 1.0 } * m * m;
        }
        acc / self.n as f64
    }

    /// Frequency of the largest non-DC bin.
    pub fn peak_frequency(&self) -> f64 {
        let k = self
            .magnitudes
            .iter()
            .enumerate()
            .skip(1)
            .fold(
                (0, f64::NEG_INFINITY),
                |best, (k, &m)| if m > best.1 { (k, m) } else { best },
            )
            .0;
        self.freqs[k]
    }
}

pub fn power_spectrum(channel: &[f64], dt: f64) -> Result<Spectrum> {
    let n = channel.len();
    if n < 2 {
        return Err(Error::Dimension { expected: 2, found: n });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("spectrum.dt", "must be > 0"));
    }
    let mean = channel.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = channel.iter().map(|&x| Complex64::new(x - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let bin_width = 1.0 / (n as f64 * dt);
    let half = n / 2;
    Ok(Spectrum {
        n,
        bin_width,
        freqs: (0..=half).map(|k| k as f64 * bin_width).collect(),
        magnitudes: buf[..=half].iter().map(|c| c.norm()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_peak() {
        let fs = 1e6;
        let x: Vec<f64> = (0..100_000).map(|i| (2.0 * PI * 1e3 * i as f64 / fs).sin()).collect();
        let s = power_spectrum(&x, 1.0 / fs).unwrap();
        assert!((s.bin_width - 10.0).abs() < 1e-9);
        assert!((s.peak_frequency() - 1e3).abs() <= s.bin_width);
    }

    #[test]
    fn parseval_odd_and_even() {
        for n in [1001usize, 1024] {
            let x: Vec<f64> = (0..n).map(|i| ((i * 7919) % 113) as f64 * 0.01 - 0.3).collect();
            let mean = x.iter().sum::<f64>() / n as f64;
            let time_power: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
            let s = power_spectrum(&x, 1e-6).unwrap();
            assert!((s.total_power() - time_power).abs() < 1e-9 * time_power);
        }
    }

    #[test]
    fn too_short() {
        assert!(power_spectrum(&[1.0], 1.0).is_err());
    }
}

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of the per-equation error term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorMode {
    /// `round(N(0, σ))` with `σ = α / √(2π)`.
    RoundedGaussian { alpha: f64 },
    /// Uniform integer in `[lo, hi]`.
    UniformInt { lo: i64, hi: i64 },
}

/// Scalar-secret (n = 1) Regev cryptosystem parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LweParams {
    pub q: u64,
    pub n: usize,
    /// Public-key length.
    pub m: usize,
    /// Public-key entries summed per encrypted bit.
    pub n_samples: usize,
    pub s: u64,
    pub error_mode: ErrorMode,
}

impl Default for LweParams {
    fn default() -> Self {
        LweParams {
            q: 7,
            n: 1,
            m: 20,
            n_samples: 5,
            s: 2,
            error_mode: ErrorMode::UniformInt { lo: 0, hi: 3 },
        }
    }
}

impl LweParams {
    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::invalid("lwe.q", "must be >= 2"));
        }
        if self.n != 1 {
            return Err(Error::invalid("lwe.n", "only the scalar secret n = 1 is supported"));
        }
        if self.n_samples == 0 || self.n_samples > self.m {
            return Err(Error::invalid("lwe.n_samples", "need 1 <= n_samples <= m"));
        }
        if self.s >= self.q {
            return Err(Error::invalid("lwe.s", "must lie in [0, q-1]"));
        }
        match self.error_mode {
            ErrorMode::RoundedGaussian { alpha } if !(alpha.is_finite() && alpha > 0.0) => {
                Err(Error::invalid("lwe.error_mode.alpha", "must be > 0"))
            }
            ErrorMode::UniformInt { lo, hi } if lo > hi => Err(Error::invalid("lwe.error_mode", "need lo <= hi")),
            _ => Ok(()),
        }
    }
}

pub fn gaussian_sigma(alpha: f64) -> f64 {
    alpha / (2.0 * std::f64::consts::PI).sqrt()
}

/// Zero-mean normal density.
pub fn gaussian_density(x: f64, sigma: f64) -> f64 {
    (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

pub fn error_sample<R: Rng + ?Sized>(mode: ErrorMode, rng: &mut R) -> Result<i64> {
    match mode {
        ErrorMode::RoundedGaussian { alpha } => {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::invalid("lwe.error_mode.alpha", "must be > 0"));
            }
            let normal = Normal::new(0.0, gaussian_sigma(alpha))
                .map_err(|e| Error::invalid("lwe.error_mode.alpha", e.to_string()))?;
            Ok(normal.sample(rng).round() as i64)
        }
        ErrorMode::UniformInt { lo, hi } => {
            if lo > hi {
                return Err(Error::invalid("lwe.error_mode", "need lo <= hi"));
            }
            Ok(rng.random_range(lo..=hi))
        }
    }
}

/// `(a·s + e) mod q`, non-negative.
pub fn lwe_sample(a: u64, s: u64, e: i64, q: u64) -> u64 {
    (a as i128 * s as i128 + e as i128).rem_euclid(q as i128) as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicKey {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
}

pub fn keygen<R: Rng + ?Sized>(params: &LweParams, rng: &mut R) -> Result<PublicKey> {
    params.validate()?;
    let mut a = Vec::with_capacity(params.m);
    let mut b = Vec::with_capacity(params.m);
    for _ in 0..params.m {
        let ai = rng.random_range(0..params.q);
        let e = error_sample(params.error_mode, rng)?;
        a.push(ai);
        b.push(lwe_sample(ai, params.s, e, params.q));
    }
    Ok(PublicKey { a, b })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ciphertext {
    pub u: u64,
    pub v: u64,
    /// 1-based public-key indices that were summed.
    pub k: Vec<usize>,
}

/// `u = Σa mod q`, `v = floor((Σb + (q/2)·φ) mod q)`, computed in integers
/// by doubling.
pub fn encrypt_samples(a_samples: &[u64], b_samples: &[u64], phi: u8, q: u64) -> (u64, u64) {
    let sa: u128 = a_samples.iter().map(|&x| x as u128).sum();
    let sb: u128 = b_samples.iter().map(|&x| x as u128).sum();
    let q = q as u128;
    let u = sa % q;
    let v = ((2 * sb + q * phi as u128) % (2 * q)) / 2;
    (u as u64, v as u64)
}

/// Encrypt one bit with a fresh subset of `n_samples` distinct key entries.
pub fn encrypt_bit<R: Rng + ?Sized>(pk: &PublicKey, phi: u8, params: &LweParams, rng: &mut R) -> Result<Ciphertext> {
    params.validate()?;
    if pk.a.len() != pk.b.len() || pk.a.len() < params.n_samples {
        return Err(Error::invalid("lwe.public_key", "key shorter than n_samples or ragged"));
    }
    let k: Vec<usize> = sample(rng, pk.a.len(), params.n_samples)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    Ok(encrypt_with_indices(pk, phi, &k, params.q))
}

pub fn encrypt_with_indices(pk: &PublicKey, phi: u8, k: &[usize], q: u64) -> Ciphertext {
    let a: Vec<u64> = k.iter().map(|&i| pk.a[i - 1]).collect();
    let b: Vec<u64> = k.iter().map(|&i| pk.b[i - 1]).collect();
    let (u, v) = encrypt_samples(&a, &b, phi, q);
    Ciphertext { u, v, k: k.to_vec() }
}

/// `raw = (v − u·s) mod q`; the bit is 1 when `raw > q/2`.
pub fn decrypt_bit(u: u64, v: u64, s: u64, q: u64) -> (u64, u8) {
    let raw = (v as i128 - u as i128 * s as i128).rem_euclid(q as i128) as u64;
    let bit = u8::from(2 * raw > q);
    (raw, bit)
}

pub fn multibit_encrypt<R: Rng + ?Sized>(
    bits: &[u8],
    pk: &PublicKey,
    params: &LweParams,
    rng: &mut R,
) -> Result<Vec<Ciphertext>> {
    if bits.is_empty() {
        return Err(Error::invalid("message", "must be nonempty"));
    }
    bits.iter().map(|&b| encrypt_bit(pk, b, params, rng)).collect()
}

pub fn multibit_decrypt(cts: &[Ciphertext], s: u64, q: u64) -> Vec<u8> {
    cts.iter().map(|c| decrypt_bit(c.u, c.v, s, q).1).collect()
}

/// Input length of one encrypted bit for an `n`-dimensional secret,
/// excluding the trailing dummy.
pub fn input_size(n_samples: usize, n: usize) -> usize {
    n_samples * n + n_samples + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn worked_tuple() {
        assert_eq!(lwe_sample(4, 3, 2, 5), 4);
        assert_eq!(lwe_sample(3, 1, -5, 7), 5);
    }

    #[test]
    fn encryption_tables() {
        assert_eq!(
            encrypt_samples(&[0, 4, 20, 21, 11], &[1, 15, 17, 0, 5], 1, 29),
            (27, 23)
        );
        assert_eq!(encrypt_samples(&[4, 2, 6, 0, 6], &[2, 5, 5, 0, 6], 1, 7), (4, 0));
        assert_eq!(encrypt_samples(&[4, 2, 6, 0, 6], &[2, 5, 5, 0, 6], 0, 7), (4, 4));
        assert_eq!(encrypt_samples(&[0; 5], &[0; 5], 0, 7), (0, 0));
    }

    #[test]
    fn decryption_tables() {
        assert_eq!(decrypt_bit(27, 23, 11, 29), (16, 1));
        assert_eq!(decrypt_bit(11, 9, 11, 29).1, 0);
        assert_eq!(decrypt_bit(4, 4, 2, 7), (3, 0));
        assert_eq!(decrypt_bit(4, 0, 2, 7), (6, 1));
        assert_eq!(decrypt_bit(0, 3, 5, 7).1, 0);
    }

    #[test]
    fn sigma_and_density() {
        assert!((gaussian_sigma(1.0) - 0.398942).abs() < 5e-7);
        assert!((gaussian_density(0.0, 1.0) - 0.398942).abs() < 5e-7);
    }

    #[test]
    fn uniform_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0usize; 4];
        for _ in 0..10_000 {
            let e = error_sample(ErrorMode::UniformInt { lo: 0, hi: 3 }, &mut rng).unwrap();
            counts[e as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 / 1e4 - 0.25).abs() < 0.03);
        }
        assert!(error_sample(ErrorMode::RoundedGaussian { alpha: 0.0 }, &mut rng).is_err());
    }

    #[test]
    fn keygen_bounds_and_zero_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = LweParams::default();
        let pk = keygen(&p, &mut rng).unwrap();
        assert!(pk.a.iter().chain(&pk.b).all(|&x| x < p.q));
        let zero = LweParams {
            s: 0,
            error_mode: ErrorMode::UniformInt { lo: 0, hi: 0 },
            ..p
        };
        assert!(keygen(&zero, &mut rng).unwrap().b.iter().all(|&b| b == 0));
    }

    #[test]
    fn phi_only_moves_v() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = LweParams::default();
        let pk = keygen(&p, &mut rng).unwrap();
        let c0 = encrypt_bit(&pk, 0, &p, &mut rng).unwrap();
        let c1 = encrypt_with_indices(&pk, 1, &c0.k, p.q);
        assert_eq!(c0.u, c1.u);
        let mut k = c0.k.clone();
        k.sort_unstable();
        k.dedup();
        assert_eq!(k.len(), 5);
        assert!(k.iter().all(|&i| (1..=20).contains(&i)));
    }

    #[test]
    fn multibit_lengths_and_freshness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = LweParams::default();
        let pk = keygen(&p, &mut rng).unwrap();
        assert_eq!(multibit_encrypt(&[0, 0, 1, 0], &pk, &p, &mut rng).unwrap().len(), 4);
        let mut collisions = 0;
        for _ in 0..100 {
            let c = multibit_encrypt(&[1, 1], &pk, &p, &mut rng).unwrap();
            collisions += usize::from(c[0].k == c[1].k);
        }
        assert!(collisions < 5);
    }

    #[test]
    fn zero_error_roundtrip() {
        // Σe = 0 decrypts φ=0 correctly but φ=1 lands on raw = (q−1)/2 = 3.
        let q = 7;
        let s = 2;
        let a = [1u64, 2, 3, 4, 5];
        let b: Vec<u64> = a.iter().map(|&x| lwe_sample(x, s, 0, q)).collect();
        let (u, v) = encrypt_samples(&a, &b, 0, q);
        assert_eq!(decrypt_bit(u, v, s, q).1, 0);
        let (u, v) = encrypt_samples(&a, &b, 1, q);
        assert_eq!(decrypt_bit(u, v, s, q), (3, 0));
    }

    #[test]
    fn sizing() {
        assert_eq!(input_size(10, 5), 61);
        assert_eq!(input_size(5, 1), 11);
    }
}

//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use chua_rc::circuit::{ChuaParams, CircuitState};

/// Chua right-hand side written out from the circuit laws, with the diode
/// expressed through absolute values instead of segment lookups.
///
/// The second array holds, per component, the sum of the magnitudes of the
/// terms, which is the scale relative errors are measured against.
pub fn chua_rhs(s: CircuitState, p: &ChuaParams, v_in: f64) -> ([f64; 3], [f64; 3]) {
    let d = &p.diode;
    let v = s.v_c1;
    let i_d = d.g_outer * v
        + 0.5 * (d.g_inner - d.g_mid) * ((v + d.bp_inner).abs() - (v - d.bp_inner).abs())
        + 0.5 * (d.g_mid - d.g_outer) * ((v + d.bp_outer).abs() - (v - d.bp_outer).abs());
    let i_d_scale = (d.g_outer * v).abs()
        + (0.5 * (d.g_inner - d.g_mid) * ((v + d.bp_inner).abs() + (v - d.bp_inner).abs())).abs()
        + (0.5 * (d.g_mid - d.g_outer) * ((v + d.bp_outer).abs() + (v - d.bp_outer).abs())).abs();
    let i_r = (s.v_c2 - s.v_c1) / p.r_variable;
    let i_r_scale = (s.v_c2.abs() + s.v_c1.abs()) / p.r_variable;
    (
        [
            (-s.v_c2 - p.r_series * s.i_l - v_in) / p.l,
            (s.i_l - i_r) / p.c2,
            (i_r - i_d) / p.c1,
        ],
        [
            (s.v_c2.abs() + (p.r_series * s.i_l).abs() + v_in.abs()) / p.l,
            (s.i_l.abs() + i_r_scale) / p.c2,
            (i_r_scale + i_d_scale) / p.c1,
        ],
    )
}

/// Largest relative deviation of `derivatives` from [`chua_rhs`].
pub fn max_rhs_error(got: CircuitState, s: CircuitState, p: &ChuaParams, v_in: f64) -> f64 {
    let (want, scale) = chua_rhs(s, p, v_in);
    [got.i_l, got.v_c2, got.v_c1]
        .iter()
        .zip(want.iter().zip(scale))
        .map(|(g, (w, sc))| (g - w).abs() / sc.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Least squares for a two-column design matrix via the normal equations
/// and Cramer's rule.
pub fn lstsq_2col(x: &[[f64; 2]], y: &[f64]) -> [f64; 2] {
    let (mut a, mut b, mut c, mut r0, mut r1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (row, &t) in x.iter().zip(y) {
        a += row[0] * row[0];
        b += row[0] * row[1];
        c += row[1] * row[1];
        r0 += row[0] * t;
        r1 += row[1] * t;
    }
    let det = a * c - b * b;
    [(r0 * c - b * r1) / det, (a * r1 - b * r0) / det]
}

/// Naive O(n²) DFT power, Σ|X_k|² / n.
pub fn dft_power(x: &[f64]) -> f64 {
    let n = x.len();
    let mut total = 0.0;
    for k in 0..n {
        let (mut re, mut im) = (0.0, 0.0);
        for (t, &v) in x.iter().enumerate() {
            let w = -2.0 * std::f64::consts::PI * (k * t % n) as f64 / n as f64;
            re += v * w.cos();
            im += v * w.sin();
        }
        total += re * re + im * im;
    }
    total / n as f64
}

/// Regev-style decryption computed with signed arithmetic.
pub fn lwe_decrypt(u: i64, v: i64, s: i64, q: i64) -> (i64, u8) {
    let raw = (v - s * u).rem_euclid(q);
    (raw, u8::from(2 * raw > q))
}

/// `u = Σa mod q`, `v = ⌊(Σb + φ·q/2) mod q⌋` evaluated in floating point.
pub fn lwe_encrypt(a: &[u64], b: &[u64], phi: u8, q: u64) -> (u64, u64) {
    let u = a.iter().sum::<u64>() % q;
    let shifted = b.iter().sum::<u64>() as f64 + phi as f64 * q as f64 / 2.0;
    let v = (shifted % q as f64).floor() as u64;
    (u, v)
}

pub fn state_distance(a: CircuitState, b: CircuitState) -> f64 {
    // Scale each component to volts so none dominates.
    let i_scale = 1e3;
    ((a.i_l - b.i_l) * i_scale)
        .hypot(a.v_c2 - b.v_c2)
        .hypot(a.v_c1 - b.v_c1)
}

/// Convergence order estimated from runs at `h`, `h/2` and `h/4`.
pub fn observed_order(coarse: CircuitState, mid: CircuitState, fine: CircuitState) -> f64 {
    (state_distance(coarse, mid) / state_distance(mid, fine)).log2()
}

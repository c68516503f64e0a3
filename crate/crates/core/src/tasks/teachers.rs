use crate::error::{Error, Result};

/// Largest operand accepted by the two-input tasks.
pub const PAIR_MAX: f64 = 40.0;

/// `x(x−4)(x−3)(x−2)(x−1)(x+1)(x+2)(x+3)(x+10)`.
pub fn polynomial_teacher(x: f64) -> f64 {
    x * (x - 4.0) * (x - 3.0) * (x - 2.0) * (x - 1.0) * (x + 1.0) * (x + 2.0) * (x + 3.0) * (x + 10.0)
}

pub const POLYNOMIAL_ROOTS: [f64; 9] = [-10.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0];

/// Non-negative remainder in `[0, base)`.
pub fn modulo_teacher(x: f64, base: f64) -> f64 {
    let r = x.rem_euclid(base);
    // rem_euclid can round up to `base` for tiny negative x.
    if r >= base {
        0.0
    } else {
        r
    }
}

pub fn poly_mod_teacher(x: f64) -> f64 {
    modulo_teacher(polynomial_teacher(x), 50.0)
}

/// `(x1 + x2, x1·x2, mod(2·x2 − x1, 3))`.
pub fn pair_teachers(x1: f64, x2: f64) -> Result<(f64, f64, f64)> {
    for (name, v) in [("x1", x1), ("x2", x2)] {
        if !(0.0..=PAIR_MAX).contains(&v) {
            return Err(Error::invalid(name, format!("{v} outside [0, {PAIR_MAX}]")));
        }
    }
    Ok((x1 + x2, x1 * x2, modulo_teacher(2.0 * x2 - x1, 3.0)))
}

/// Nearest of the training targets `1` (class 0) and `2` (class 1).
pub fn classify(estimate: f64) -> usize {
    usize::from(estimate >= 1.5)
}

pub fn class_teacher(class: usize) -> f64 {
    class as f64 + 1.0
}

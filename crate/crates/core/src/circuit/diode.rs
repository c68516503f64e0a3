//! Five-segment piecewise-linear model of the Kennedy Chua diode.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Op-amp saturation voltage assumed for a ±9 V supply.
pub const DEFAULT_ESAT: f64 = 8.3;

/// One negative-impedance-converter branch of the diode.
///
/// `r_feedback` connects the output to the non-inverting input (the diode
/// terminal), `r_top` the output to the inverting input, and `r_bottom` the
/// inverting input to ground.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NicBranch {
    pub r_feedback: f64,
    pub r_top: f64,
    pub r_bottom: f64,
}

impl NicBranch {
    /// Small-signal conductance seen at the terminal while the op-amp is linear.
    pub fn linear_conductance(&self) -> f64 {
        -self.r_top / (self.r_feedback * self.r_bottom)
    }

    /// Conductance once the op-amp output sits at a rail.
    pub fn saturated_conductance(&self) -> f64 {
        1.0 / self.r_feedback
    }

    /// Terminal voltage at which the op-amp output reaches `esat`.
    pub fn breakpoint(&self, esat: f64) -> f64 {
        esat * self.r_bottom / (self.r_top + self.r_bottom)
    }
}

/// Odd, continuous, five-segment current/voltage characteristic.
///
/// `g_inner` applies for `|v| < bp_inner`, `g_mid` between the breakpoints and
/// `g_outer` beyond `bp_outer`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiodePwl {
    pub g_inner: f64,
    pub g_mid: f64,
    pub g_outer: f64,
    pub bp_inner: f64,
    pub bp_outer: f64,
}

impl DiodePwl {
    /// Build the characteristic from two NIC branches. The branch with the
    /// lower breakpoint saturates first.
    pub fn from_nic(a: NicBranch, b: NicBranch, esat: f64) -> Self {
        let (early, late) = if a.breakpoint(esat) <= b.breakpoint(esat) {
            (a, b)
        } else {
            (b, a)
        };
        DiodePwl {
            g_inner: early.linear_conductance() + late.linear_conductance(),
            g_mid: early.saturated_conductance() + late.linear_conductance(),
            g_outer: early.saturated_conductance() + late.saturated_conductance(),
            bp_inner: early.breakpoint(esat),
            bp_outer: late.breakpoint(esat),
        }
    }

    /// Kennedy's component values: 220 Ω / 220 Ω / 2.2 kΩ and
    /// 22 kΩ / 22 kΩ / 3.3 kΩ.
    pub fn kennedy(esat: f64) -> Self {
        let fast = NicBranch {
            r_feedback: 220.0,
            r_top: 220.0,
            r_bottom: 2200.0,
        };
        let slow = NicBranch {
            r_feedback: 22e3,
            r_top: 22e3,
            r_bottom: 3.3e3,
        };
        Self::from_nic(fast, slow, esat)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.g_inner, self.g_mid, self.g_outer, self.bp_inner, self.bp_outer];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("circuit.diode", "non-finite coefficient"));
        }
        if !(self.g_inner < self.g_mid && self.g_mid < 0.0 && 0.0 < self.g_outer) {
            return Err(Error::invalid(
                "circuit.diode",
                "slopes must satisfy g_inner < g_mid < 0 < g_outer",
            ));
        }
        if !(0.0 < self.bp_inner && self.bp_inner < self.bp_outer) {
            return Err(Error::invalid(
                "circuit.diode",
                "breakpoints must satisfy 0 < bp_inner < bp_outer",
            ));
        }
        Ok(())
    }

    /// Current drawn by the diode at terminal voltage `v`.
    pub fn current(&self, v: f64) -> f64 {
        let a = v.abs();
        let magnitude = if a < self.bp_inner {
            self.g_inner * a
        } else if a < self.bp_outer {
            self.g_inner * self.bp_inner + self.g_mid * (a - self.bp_inner)
        } else {
            self.g_inner * self.bp_inner
                + self.g_mid * (self.bp_outer - self.bp_inner)
                + self.g_outer * (a - self.bp_outer)
        };
        if v < 0.0 {
            -magnitude
        } else {
            magnitude
        }
    }
}

impl Default for DiodePwl {
    fn default() -> Self {
        Self::kennedy(DEFAULT_ESAT)
    }
}

/// Free-function form of [`DiodePwl::current`].
pub fn diode_current(v: f64, d: &DiodePwl) -> f64 {
    d.current(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kennedy_defaults() {
        let d = DiodePwl::default();
        assert!((d.g_inner + 0.7576e-3).abs() < 1e-7);
        assert!((d.g_mid + 0.409e-3).abs() < 1e-6);
        assert!((d.g_outer - 4.59e-3).abs() < 1e-5);
        assert!((d.bp_inner - 1.08).abs() < 5e-3);
        assert!((d.bp_outer - 7.54).abs() < 1e-2);
        d.validate().unwrap();
    }

    #[test]
    fn inner_segment_value() {
        let d = DiodePwl::default();
        assert!((d.current(1.0) + 7.576e-4).abs() < 1e-7);
        assert_eq!(d.current(0.0), 0.0);
    }

    #[test]
    fn continuity_at_breakpoints() {
        let d = DiodePwl::default();
        for bp in [d.bp_inner, d.bp_outer] {
            for sign in [1.0, -1.0] {
                let below = d.current(sign * bp * (1.0 - 1e-13));
                let above = d.current(sign * bp * (1.0 + 1e-13));
                assert!((below - above).abs() < 1e-12, "jump at {bp}");
            }
        }
    }

    #[test]
    fn matches_abs_value_closed_form() {
        // Standard Chua expression built from absolute values.
        let d = DiodePwl::default();
        let closed = |v: f64| {
            d.g_outer * v
                + 0.5 * (d.g_inner - d.g_mid) * ((v + d.bp_inner).abs() - (v - d.bp_inner).abs())
                + 0.5 * (d.g_mid - d.g_outer) * ((v + d.bp_outer).abs() - (v - d.bp_outer).abs())
        };
        for i in -200..=200 {
            let v = i as f64 * 0.05;
            assert!((d.current(v) - closed(v)).abs() < 1e-12, "v = {v}");
        }
    }

    #[test]
    fn rejects_bad_slopes() {
        let d = DiodePwl {
            g_mid: 1e-3,
            ..Default::default()
        };
        assert!(d.validate().is_err());
        let d = DiodePwl {
            bp_outer: 0.5,
            ..Default::default()
        };
        assert!(d.validate().is_err());
    }

    proptest::proptest! {
        #[test]
        fn odd_symmetry(v in -20.0f64..20.0) {
            let d = DiodePwl::default();
            proptest::prop_assert_eq!(d.current(-v), -d.current(v));
        }
    }
}

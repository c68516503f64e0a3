//! Scoring of case-level estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_NMSE_CAP: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NmseReport {
    pub per_case: Vec<f64>,
    /// Cases whose target was exactly zero; their score is the cap.
    pub zero_target: Vec<bool>,
    pub mean: f64,
    pub median: f64,
}

/// `Σ(e − t)² / (n·Σt²)` over the outputs of one case, capped.
/// Returns `None` for an all-zero target.
pub fn nmse_case(estimate: &[f64], target: &[f64], cap: f64) -> Option<f64> {
    let num: f64 = estimate.iter().zip(target).map(|(e, t)| (e - t) * (e - t)).sum();
    let den: f64 = target.iter().map(|t| t * t).sum::<f64>() * target.len() as f64;
    if den == 0.0 {
        None
    } else {
        Some((num / den).min(cap))
    }
}

pub fn nmse(estimates: &[Vec<f64>], targets: &[Vec<f64>], cap: f64) -> Result<NmseReport> {
    if estimates.len() != targets.len() {
        return Err(Error::Dimension {
            expected: targets.len(),
            found: estimates.len(),
        });
    }
    if targets.is_empty() {
        return Err(Error::UndefinedMetric("no cases to score".into()));
    }
    if cap.is_nan() || cap <= 0.0 {
        return Err(Error::invalid("metrics.cap", "must be > 0"));
    }
    let mut per_case = Vec::with_capacity(targets.len());
    let mut zero_target = Vec::with_capacity(targets.len());
    for (e, t) in estimates.iter().zip(targets) {
        if e.len() != t.len() {
            return Err(Error::Dimension {
                expected: t.len(),
                found: e.len(),
            });
        }
        match nmse_case(e, t, cap) {
            Some(s) => {
                per_case.push(s);
                zero_target.push(false);
            }
            None => {
                per_case.push(cap);
                zero_target.push(true);
            }
        }
    }
    Ok(NmseReport {
        mean: mean(&per_case),
        median: median(&per_case),
        per_case,
        zero_target,
    })
}

/// Scalar-output convenience wrapper around [`nmse`].
pub fn nmse_scalar(estimates: &[f64], targets: &[f64], cap: f64) -> Result<NmseReport> {
    let wrap = |v: &[f64]| v.iter().map(|&x| vec![x]).collect::<Vec<_>>();
    nmse(&wrap(estimates), &wrap(targets), cap)
}

/// Root-mean-square error over the population standard deviation of the targets.
pub fn nrmse(estimates: &[f64], targets: &[f64]) -> Result<f64> {
    if estimates.len() != targets.len() {
        return Err(Error::Dimension {
            expected: targets.len(),
            found: estimates.len(),
        });
    }
    if targets.len() < 2 {
        return Err(Error::UndefinedMetric("need at least two targets".into()));
    }
    let sigma = std_dev(targets);
    if sigma == 0.0 {
        return Err(Error::UndefinedMetric("targets have zero spread".into()));
    }
    let mse = estimates
        .iter()
        .zip(targets)
        .map(|(e, t)| (e - t) * (e - t))
        .sum::<f64>()
        / targets.len() as f64;
    Ok(mse.sqrt() / sigma)
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Population standard deviation.
pub fn std_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64).sqrt()
}

/// `counts[actual][predicted]` for labels `0..n_classes`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub n_classes: usize,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn new(actual: &[usize], predicted: &[usize], n_classes: usize) -> Result<Self> {
        if actual.len() != predicted.len() {
            return Err(Error::Dimension {
                expected: actual.len(),
                found: predicted.len(),
            });
        }
        let mut counts = vec![vec![0; n_classes]; n_classes];
        for (&a, &p) in actual.iter().zip(predicted) {
            if a >= n_classes || p >= n_classes {
                return Err(Error::invalid("classes", format!("label out of range 0..{n_classes}")));
            }
            counts[a][p] += 1;
        }
        Ok(ConfusionMatrix { n_classes, counts })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let correct: usize = (0..self.n_classes).map(|i| self.counts[i][i]).sum();
        correct as f64 / self.total() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nmse_examples() {
        let r = nmse_scalar(&[0.02, 1.0, 2.0], &[0.01, 1.0, 1.0], 1.0).unwrap();
        assert!((r.per_case[0] - 1.0).abs() < 1e-12);
        assert_eq!(r.per_case[1], 0.0);
        assert_eq!(r.per_case[2], 1.0);
        assert_eq!(r.median, 1.0);
    }

    #[test]
    fn zero_target_flagged() {
        let r = nmse_scalar(&[0.5, 1.1], &[0.0, 1.0], 1.0).unwrap();
        assert_eq!(r.per_case[0], 1.0);
        assert_eq!(r.zero_target, vec![true, false]);
    }

    #[test]
    fn vector_case_sums_outputs() {
        let r = nmse(&[vec![3.0, 4.0]], &[vec![2.0, 4.0]], 1.0).unwrap();
        assert!((r.per_case[0] - 1.0 / (2.0 * 20.0)).abs() < 1e-15);
    }

    #[test]
    fn nrmse_examples() {
        let t = [1.0, 2.0, 4.0, 7.0];
        assert_eq!(nrmse(&t, &t).unwrap(), 0.0);
        let s = std_dev(&t);
        let shifted: Vec<f64> = t.iter().map(|x| x + s).collect();
        assert!((nrmse(&shifted, &t).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            nrmse(&[1.0, 1.0], &[2.0, 2.0]),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn confusion() {
        let c = ConfusionMatrix::new(&[0, 0, 1, 1], &[0, 1, 1, 1], 2).unwrap();
        assert_eq!(c.counts, vec![vec![1, 1], vec![0, 2]]);
        assert_eq!(c.accuracy(), 0.75);
    }

    proptest::proptest! {
        #[test]
        fn nmse_within_cap(e in proptest::collection::vec(-10.0f64..10.0, 1..20), cap in 0.1f64..5.0) {
            let t: Vec<f64> = e.iter().map(|x| x * 0.7 + 0.3).collect();
            let r = nmse_scalar(&e, &t, cap).unwrap();
            for s in r.per_case {
                proptest::prop_assert!((0.0..=cap).contains(&s));
            }
        }

        #[test]
        fn nrmse_shift_invariant(t in proptest::collection::vec(-5.0f64..5.0, 3..20), c in -10.0f64..10.0) {
            let e: Vec<f64> = t.iter().enumerate().map(|(i, x)| x + 0.1 * i as f64).collect();
            proptest::prop_assume!(std_dev(&t) > 1e-3);
            let a = nrmse(&e, &t).unwrap();
            let es: Vec<f64> = e.iter().map(|x| x + c).collect();
            let ts: Vec<f64> = t.iter().map(|x| x + c).collect();
            let b = nrmse(&es, &ts).unwrap();
            proptest::prop_assert!((a - b).abs() < 1e-9);
        }
    }
}

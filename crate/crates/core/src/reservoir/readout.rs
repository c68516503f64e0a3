//! Linear readout trained from accumulated correlation matrices.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::output::StateMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReadoutOptions {
    pub bias: bool,
    /// Added to every channel voltage before training and prediction.
    pub offset: f64,
    /// Ridge strength; the bias weight is never penalized.
    pub lambda: f64,
}

impl Default for ReadoutOptions {
    fn default() -> Self {
        ReadoutOptions {
            bias: true,
            offset: 0.0,
            lambda: 0.0,
        }
    }
}

impl ReadoutOptions {
    pub fn validate(&self) -> Result<()> {
        if !self.offset.is_finite() {
            return Err(Error::invalid("readout.offset", "must be finite"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::invalid("readout.lambda", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Trained weights, `n_outputs × (n_channels + 1)` row-major, column 0
/// holding the bias weight (zero when the bias is disabled).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutWeight {
    pub n_outputs: usize,
    pub n_channels: usize,
    pub bias: bool,
    pub offset: f64,
    pub lambda: f64,
    pub seed: u64,
    pub config_digest: String,
    pub matrix: Vec<f64>,
}

impl ReadoutWeight {
    pub fn row(&self, out: usize) -> &[f64] {
        let w = self.n_channels + 1;
        &self.matrix[out * w..(out + 1) * w]
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.n_outputs * (self.n_channels + 1);
        if self.matrix.len() != expected {
            return Err(Error::Dimension {
                expected,
                found: self.matrix.len(),
            });
        }
        if self.matrix.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("readout.matrix", "non-finite weight"));
        }
        Ok(())
    }

    /// One estimate per output for each row of `x`.
    pub fn predict_rows(&self, x: &StateMatrix) -> Result<Vec<Vec<f64>>> {
        if x.n_cols != self.n_channels {
            return Err(Error::Dimension {
                expected: self.n_channels,
                found: x.n_cols,
            });
        }
        let b = if self.bias { 1.0 } else { 0.0 };
        Ok(x.rows()
            .map(|row| {
                (0..self.n_outputs)
                    .map(|o| {
                        let w = self.row(o);
                        w[1..]
                            .iter()
                            .zip(row)
                            .fold(w[0] * b, |acc, (wi, xi)| acc + wi * (xi + self.offset))
                    })
                    .collect()
            })
            .collect())
    }

    /// Case-level estimate: the per-row estimates averaged over all rows.
    pub fn predict(&self, x: &StateMatrix) -> Result<Vec<f64>> {
        if x.n_rows == 0 {
            return Err(Error::EmptyTraining);
        }
        let rows = self.predict_rows(x)?;
        let mut sum = vec![0.0; self.n_outputs];
        for r in &rows {
            for (s, v) in sum.iter_mut().zip(r) {
                *s += v;
            }
        }
        Ok(sum.into_iter().map(|s| s / rows.len() as f64).collect())
    }
}

/// Running sums `XX = Σ p·pᵀ` and `YY = Σ y·pᵀ` with `p = [1; row + offset]`.
#[derive(Clone, Debug)]
pub struct Accumulator {
    opts: ReadoutOptions,
    n_channels: usize,
    n_outputs: usize,
    xx: DMatrix<f64>,
    yy: DMatrix<f64>,
    n_rows: usize,
}

impl Accumulator {
    pub fn new(n_channels: usize, n_outputs: usize, opts: ReadoutOptions) -> Result<Self> {
        opts.validate()?;
        if n_outputs == 0 {
            return Err(Error::invalid("readout.n_outputs", "must be >= 1"));
        }
        let d = n_channels + 1;
        Ok(Accumulator {
            opts,
            n_channels,
            n_outputs,
            xx: DMatrix::zeros(d, d),
            yy: DMatrix::zeros(n_outputs, d),
            n_rows: 0,
        })
    }

    pub fn add_case(&mut self, x: &StateMatrix, teacher: &[f64]) -> Result<()> {
        if x.n_cols != self.n_channels {
            return Err(Error::Dimension {
                expected: self.n_channels,
                found: x.n_cols,
            });
        }
        if teacher.len() != self.n_outputs {
            return Err(Error::Dimension {
                expected: self.n_outputs,
                found: teacher.len(),
            });
        }
        let d = self.n_channels + 1;
        let mut p = DVector::zeros(d);
        p[0] = if self.opts.bias { 1.0 } else { 0.0 };
        let y = DVector::from_column_slice(teacher);
        for row in x.rows() {
            for (dst, v) in p.iter_mut().skip(1).zip(row) {
                *dst = v + self.opts.offset;
            }
            self.xx.ger(1.0, &p, &p, 1.0);
            self.yy.ger(1.0, &y, &p, 1.0);
            self.n_rows += 1;
        }
        Ok(())
    }

    /// Minimum-norm solution of `(XX + λ·I′)·Wᵀ = YYᵀ`.
    pub fn solve(&self) -> Result<ReadoutWeight> {
        if self.n_rows == 0 {
            return Err(Error::EmptyTraining);
        }
        let d = self.n_channels + 1;
        let mut a = self.xx.clone();
        for i in 1..d {
            a[(i, i)] += self.opts.lambda;
        }
        let rhs = self.yy.transpose();
        let svd = a.svd(true, true);
        let s_max = svd.singular_values.max();
        let tol = d as f64 * f64::EPSILON * s_max;
        let wt = if s_max > 0.0 {
            svd.solve(&rhs, tol).map_err(|e| Error::invalid("readout", e))?
        } else {
            DMatrix::zeros(d, self.n_outputs)
        };
        let w = wt.transpose();
        let mut matrix = Vec::with_capacity(self.n_outputs * d);
        for o in 0..self.n_outputs {
            matrix.extend(w.row(o).iter());
        }
        let weight = ReadoutWeight {
            n_outputs: self.n_outputs,
            n_channels: self.n_channels,
            bias: self.opts.bias,
            offset: self.opts.offset,
            lambda: self.opts.lambda,
            seed: 0,
            config_digest: String::new(),
            matrix,
        };
        weight.validate()?;
        Ok(weight)
    }
}

/// Train on `(activations, teacher)` pairs, accumulated in slice order.
pub fn train_readout(cases: &[(StateMatrix, Vec<f64>)], opts: ReadoutOptions) -> Result<ReadoutWeight> {
    let (first, teacher) = cases.first().ok_or(Error::EmptyTraining)?;
    let mut acc = Accumulator::new(first.n_cols, teacher.len(), opts)?;
    for (x, y) in cases {
        acc.add_case(x, y)?;
    }
    acc.solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> StateMatrix {
        StateMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn weight(matrix: Vec<f64>, n_channels: usize, bias: bool) -> ReadoutWeight {
        ReadoutWeight {
            n_outputs: matrix.len() / (n_channels + 1),
            n_channels,
            bias,
            offset: 0.0,
            lambda: 0.0,
            seed: 0,
            config_digest: String::new(),
            matrix,
        }
    }

    #[test]
    fn bias_only_weight() {
        let w = weight(vec![2.5, 0.0, 0.0], 2, true);
        assert_eq!(w.predict(&m(&[&[1.0, -3.0], &[7.0, 0.2]])).unwrap(), vec![2.5]);
    }

    #[test]
    fn single_row_affine() {
        let w = weight(vec![0.5, 2.0, -1.0], 2, true);
        let est = w.predict(&m(&[&[0.3, 0.8]])).unwrap();
        assert!((est[0] - (0.5 + 0.6 - 0.8)).abs() < 1e-15);
    }

    #[test]
    fn linear_in_weights() {
        let x = m(&[&[0.3, 0.8], &[0.1, -0.4]]);
        let a = weight(vec![0.0, 2.0, -1.0], 2, true).predict(&x).unwrap()[0];
        let b = weight(vec![0.0, 4.0, -2.0], 2, true).predict(&x).unwrap()[0];
        assert!((b - 2.0 * a).abs() < 1e-15);
    }

    #[test]
    fn single_case_reproduced() {
        let x = m(&[&[0.4, 0.9, 0.1], &[0.5, 0.7, 0.3], &[0.45, 0.8, 0.2], &[0.6, 0.5, 0.6]]);
        let w = train_readout(&[(x.clone(), vec![3.2, -1.0])], ReadoutOptions::default()).unwrap();
        let est = w.predict(&x).unwrap();
        assert!((est[0] - 3.2).abs() < 1e-6 * 3.2);
        assert!((est[1] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn huge_ridge_leaves_bias() {
        let cases: Vec<_> = (0..5)
            .map(|i| {
                let v = i as f64 * 0.1;
                (m(&[&[v, 1.0 - v], &[v * v, 0.5]]), vec![1.0 + i as f64])
            })
            .collect();
        let w = train_readout(
            &cases,
            ReadoutOptions {
                lambda: 1e9,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(w.matrix[1..].iter().all(|x| x.abs() < 1e-6));
        assert!((w.matrix[0] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn disabled_bias_has_zero_column() {
        let x = m(&[&[0.4, 0.9], &[0.5, 0.7]]);
        let w = train_readout(
            &[(x.clone(), vec![1.0])],
            ReadoutOptions {
                bias: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(w.matrix[0], 0.0);
        assert!((w.predict(&x).unwrap()[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dimension_errors() {
        let x = m(&[&[0.4, 0.9]]);
        assert!(matches!(
            train_readout(&[], ReadoutOptions::default()),
            Err(Error::EmptyTraining)
        ));
        let bad = vec![(x.clone(), vec![1.0]), (m(&[&[1.0]]), vec![1.0])];
        assert!(matches!(
            train_readout(&bad, ReadoutOptions::default()),
            Err(Error::Dimension { .. })
        ));
        let w = weight(vec![0.0; 3], 2, true);
        assert!(w.predict(&m(&[&[1.0]])).is_err());
    }
}

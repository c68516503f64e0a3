use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::teachers::{class_teacher, modulo_teacher, pair_teachers, poly_mod_teacher, polynomial_teacher, PAIR_MAX};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, CsvText};
use crate::lwe::{generate_testcases, LweParams, LweTestCase};
use crate::seed::{derive_seed, rng_for};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Circles,
    #[default]
    Polynomial,
    Modulo,
    PolyMod,
    PairSum,
    PairProduct,
    PairModlin,
    LweEncrypt,
    LweDecrypt,
}

impl TaskKind {
    pub fn is_classification(self) -> bool {
        matches!(self, TaskKind::Circles | TaskKind::LweDecrypt)
    }

    pub fn n_outputs(self) -> usize {
        if self == TaskKind::LweEncrypt {
            2
        } else {
            1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskSpec {
    pub kind: TaskKind,
    /// Regression domain.
    pub x_min: f64,
    pub x_max: f64,
    pub modulo_base: f64,
    /// Radius band of class 1.
    pub inner_radius: [f64; 2],
    /// Radius band of class 0.
    pub outer_radius: [f64; 2],
}

impl Default for TaskSpec {
    fn default() -> Self {
        TaskSpec {
            kind: TaskKind::Polynomial,
            x_min: 0.1,
            x_max: 3.0,
            modulo_base: 1.3,
            inner_radius: [0.0, 1.0],
            outer_radius: [1.5, 2.5],
        }
    }
}

impl TaskSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && 0.0 <= self.x_min && self.x_min < self.x_max) {
            return Err(Error::invalid("task.x_min", "need 0 <= x_min < x_max"));
        }
        if self.modulo_base.is_nan() || self.modulo_base <= 0.0 {
            return Err(Error::invalid("task.modulo_base", "must be > 0"));
        }
        let [a, b] = self.inner_radius;
        let [c, d] = self.outer_radius;
        if !(0.0 <= a && a <= b && b < c && c <= d && d.is_finite()) {
            return Err(Error::invalid(
                "task.inner_radius",
                "need 0 <= inner band < outer band, both ordered",
            ));
        }
        Ok(())
    }

    /// Largest raw value the task feeds the reservoir.
    pub fn value_max(&self, lwe: &LweParams) -> f64 {
        match self.kind {
            TaskKind::Circles => 2.0 * self.outer_radius[1],
            TaskKind::Polynomial | TaskKind::Modulo | TaskKind::PolyMod => self.x_max,
            TaskKind::PairSum | TaskKind::PairProduct | TaskKind::PairModlin => PAIR_MAX,
            TaskKind::LweEncrypt | TaskKind::LweDecrypt => (lwe.q - 1).max(1) as f64,
        }
    }

    /// Reservoir messages for a circle point; coordinates are shifted to be
    /// non-negative and run through the kernel separately.
    pub fn circle_inputs(&self, x: f64, y: f64) -> Vec<Vec<f64>> {
        let shift = self.outer_radius[1];
        vec![vec![x + shift], vec![y + shift]]
    }
}

/// Disjoint train/validation index sets, each ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
}

pub fn split_dataset(n: usize, val_fraction: f64, seed: u64) -> Result<Split> {
    if !(val_fraction > 0.0 && val_fraction < 1.0) {
        return Err(Error::invalid("val_fraction", "must lie in (0, 1)"));
    }
    let n_val = (n as f64 * val_fraction).round() as usize;
    if n_val == 0 || n_val == n {
        return Err(Error::invalid(
            "val_fraction",
            format!("{n} cases leave an empty side at fraction {val_fraction}"),
        ));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng_for(seed, &[]));
    let mut val = idx[..n_val].to_vec();
    let mut train = idx[n_val..].to_vec();
    val.sort_unstable();
    train.sort_unstable();
    Ok(Split { train, val })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub kind: TaskKind,
    /// Per case, the messages run through the kernel independently.
    pub inputs: Vec<Vec<Vec<f64>>>,
    pub teachers: Vec<Vec<f64>>,
    /// Raw columns as written to the dataset CSV.
    pub features: Vec<Vec<f64>>,
    pub labels: Option<Vec<usize>>,
    pub lwe_cases: Option<Vec<LweTestCase>>,
    pub value_max: f64,
    pub split: Split,
    pub seed: u64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn csv_header(kind: TaskKind) -> &'static str {
        match kind {
            TaskKind::Circles => "x,y,class",
            TaskKind::Polynomial | TaskKind::Modulo | TaskKind::PolyMod => "x,y_teacher",
            TaskKind::PairSum | TaskKind::PairProduct | TaskKind::PairModlin => "x1,x2,sum,product,modlin",
            TaskKind::LweEncrypt | TaskKind::LweDecrypt => "phi,u,v,decrypt_value",
        }
    }

    pub fn to_csv(&self, digest: Option<&str>) -> CsvText {
        let mut csv = CsvText::new(Self::csv_header(self.kind), digest);
        for f in &self.features {
            csv.row(f.iter().map(|&x| {
                if x.fract() == 0.0 && x.abs() < 1e15 {
                    format!("{x:.0}")
                } else {
                    fmt_f64(x)
                }
            }));
        }
        csv
    }
}

/// Evenly spaced `n` points over `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Area-uniform point with radius in `[r0, r1]`.
fn annulus_point<R: Rng>(rng: &mut R, r0: f64, r1: f64) -> (f64, f64) {
    let r = (rng.random_range(r0 * r0..=r1 * r1)).sqrt();
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    (r * a.cos(), r * a.sin())
}

/// Alternating-class circle points: even indices class 0 (outer band).
pub fn concentric_circles(spec: &TaskSpec, n_points: usize, seed: u64) -> Result<Vec<(f64, f64, usize)>> {
    spec.validate()?;
    if n_points < 2 {
        return Err(Error::invalid("n_cases", "need at least 2 points"));
    }
    let mut rng = rng_for(seed, &[0]);
    Ok((0..n_points)
        .map(|i| {
            let class = i % 2;
            let [r0, r1] = if class == 1 {
                spec.inner_radius
            } else {
                spec.outer_radius
            };
            let (x, y) = annulus_point(&mut rng, r0, r1);
            (x, y, class)
        })
        .collect())
}

pub fn generate_dataset(
    spec: &TaskSpec,
    lwe: &LweParams,
    n_cases: usize,
    val_fraction: f64,
    seed: u64,
) -> Result<Dataset> {
    spec.validate()?;
    if n_cases == 0 {
        return Err(Error::invalid("n_cases", "must be >= 1"));
    }
    let mut inputs = Vec::with_capacity(n_cases);
    let mut teachers = Vec::with_capacity(n_cases);
    let mut features = Vec::with_capacity(n_cases);
    let mut labels = None;
    let mut lwe_cases = None;
    match spec.kind {
        TaskKind::Circles => {
            let pts = concentric_circles(spec, n_cases, seed)?;
            let mut l = Vec::with_capacity(n_cases);
            for (x, y, class) in pts {
                inputs.push(spec.circle_inputs(x, y));
                teachers.push(vec![class_teacher(class)]);
                features.push(vec![x, y, class as f64]);
                l.push(class);
            }
            labels = Some(l);
        }
        TaskKind::Polynomial | TaskKind::Modulo | TaskKind::PolyMod => {
            for x in linspace(spec.x_min, spec.x_max, n_cases) {
                let y = match spec.kind {
                    TaskKind::Polynomial => polynomial_teacher(x),
                    TaskKind::Modulo => modulo_teacher(x, spec.modulo_base),
                    _ => poly_mod_teacher(x),
                };
                inputs.push(vec![vec![x]]);
                teachers.push(vec![y]);
                features.push(vec![x, y]);
            }
        }
        TaskKind::PairSum | TaskKind::PairProduct | TaskKind::PairModlin => {
            let side = PAIR_MAX as usize + 1;
            let mut grid: Vec<(usize, usize)> = (0..side).flat_map(|a| (0..side).map(move |b| (a, b))).collect();
            if n_cases < grid.len() {
                grid.shuffle(&mut rng_for(seed, &[0]));
                grid.truncate(n_cases);
            }
            for (a, b) in grid {
                let (x1, x2) = (a as f64, b as f64);
                let (sum, product, modlin) = pair_teachers(x1, x2)?;
                let y = match spec.kind {
                    TaskKind::PairSum => sum,
                    TaskKind::PairProduct => product,
                    _ => modlin,
                };
                inputs.push(vec![vec![x1, x2]]);
                teachers.push(vec![y]);
                features.push(vec![x1, x2, sum, product, modlin]);
            }
        }
        TaskKind::LweEncrypt | TaskKind::LweDecrypt => {
            let cases = generate_testcases(lwe, n_cases, derive_seed(seed, &[1]))?;
            for c in &cases {
                if spec.kind == TaskKind::LweEncrypt {
                    inputs.push(vec![c.message()]);
                    teachers.push(vec![c.u as f64, c.v as f64]);
                } else {
                    inputs.push(vec![vec![c.u as f64, c.v as f64]]);
                    teachers.push(vec![class_teacher(c.phi as usize)]);
                }
                features.push(vec![c.phi as f64, c.u as f64, c.v as f64, c.decrypt_value as f64]);
            }
            if spec.kind == TaskKind::LweDecrypt {
                labels = Some(cases.iter().map(|c| c.phi as usize).collect());
            }
            lwe_cases = Some(cases);
        }
    }
    let split = split_dataset(inputs.len(), val_fraction, derive_seed(seed, &[2]))?;
    Ok(Dataset {
        kind: spec.kind,
        inputs,
        teachers,
        features,
        labels,
        lwe_cases,
        value_max: spec.value_max(lwe),
        split,
        seed,
    })
}

/// Regular grid over which a classifier's decision surface is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn square(half_width: f64, n: usize) -> Self {
        GridSpec {
            x_min: -half_width,
            x_max: half_width,
            y_min: -half_width,
            y_max: half_width,
            nx: n,
            ny: n,
        }
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let xs = linspace(self.x_min, self.x_max, self.nx);
        let ys = linspace(self.y_min, self.y_max, self.ny);
        ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect()
    }
}

/// Class predicted at each grid point, in row-major (y outer) order.
pub fn decision_surface<F>(grid: &GridSpec, estimate: F) -> Result<Vec<(f64, f64, usize)>>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    grid.points()
        .into_par_iter()
        .map(|(x, y)| Ok((x, y, super::teachers::classify(estimate(x, y)?))))
        .collect()
}

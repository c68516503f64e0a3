use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::experiment::run_experiment;
use crate::error::Result;
use crate::io::{fmt_f64, CsvText};
use crate::seed::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub n_mask: Option<usize>,
    pub r_ohms: f64,
    pub v_center: f64,
    /// NaN when the cell failed.
    pub mean_nmse: f64,
    pub error: Option<String>,
}

/// Configuration of cell `(i, j[, k])`: resistance `i`, centre `j` and
/// optional mask count `k`, seeded from the grid indices.
pub fn cell_config(cfg: &ExperimentConfig, i: usize, j: usize, k: Option<usize>) -> ExperimentConfig {
    let g = &cfg.sweep;
    let mut c = cfg.clone();
    c.circuit.r_variable = g.r_ohms[i];
    let center = g.v_centers[j];
    c.reservoir.v_min = center - 0.5 * g.v_width;
    c.reservoir.v_max = center + 0.5 * g.v_width;
    let mut labels = vec![i as u64, j as u64];
    if let (Some(k), Some(masks)) = (k, &g.n_masks) {
        c.reservoir.n_mask = masks[k];
        labels.push(k as u64);
    }
    c.master_seed = derive_seed(cfg.master_seed, &labels);
    c
}

/// Mean validation NMSE over the sweep grid, in `(k, i, j)` order. A failed
/// cell is recorded and the sweep moves on.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepCell>> {
    cfg.sweep.validate()?;
    let g = &cfg.sweep;
    let masks: Vec<Option<usize>> = match &g.n_masks {
        Some(m) => (0..m.len()).map(Some).collect(),
        None => vec![None],
    };
    let mut cells = Vec::with_capacity(g.n_cells());
    for &k in &masks {
        for i in 0..g.r_ohms.len() {
            for j in 0..g.v_centers.len() {
                let c = cell_config(cfg, i, j, k);
                let (mean_nmse, error) = match run_experiment(&c) {
                    Ok(o) => (o.report.mean_nmse, None),
                    Err(e) => {
                        log::warn!("sweep cell ({i}, {j}) failed: {e}");
                        (f64::NAN, Some(e.to_string()))
                    }
                };
                log::info!("cell r={} v_center={} -> {mean_nmse}", g.r_ohms[i], g.v_centers[j]);
                cells.push(SweepCell {
                    n_mask: k.map(|_| c.reservoir.n_mask),
                    r_ohms: g.r_ohms[i],
                    v_center: g.v_centers[j],
                    mean_nmse,
                    error,
                });
            }
        }
    }
    Ok(cells)
}

pub fn sweep_csv(cells: &[SweepCell], digest: &str) -> CsvText {
    let with_mask = cells.first().is_some_and(|c| c.n_mask.is_some());
    let header = if with_mask {
        "n_mask,r_ohms,v_center,mean_nmse"
    } else {
        "r_ohms,v_center,mean_nmse"
    };
    let mut csv = CsvText::new(header, Some(digest));
    for c in cells {
        let mut row = Vec::new();
        if let Some(m) = c.n_mask {
            row.push(m.to_string());
        }
        row.extend([fmt_f64(c.r_ohms), fmt_f64(c.v_center), fmt_f64(c.mean_nmse)]);
        csv.row(row);
    }
    csv
}

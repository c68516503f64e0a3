use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{label, ExperimentConfig};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, write_json, CsvText};
use crate::reservoir::{nmse, run_case, Accumulator, ConfusionMatrix, ReadoutWeight, ReservoirConfig, StateMatrix};
use crate::seed::derive_seed;
use crate::tasks::{classify, decision_surface, generate_dataset, Dataset, TaskKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseFailure {
    pub index: usize,
    pub error: String,
}

/// Validation outcome of one case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub index: usize,
    pub target: Vec<f64>,
    pub estimate: Vec<f64>,
    pub nmse: f64,
    pub zero_target: bool,
    pub class: Option<usize>,
    pub predicted: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub task: TaskKind,
    pub n_train: usize,
    pub n_val: usize,
    pub failures: Vec<CaseFailure>,
    pub nmse: Vec<f64>,
    pub mean_nmse: f64,
    pub median_nmse: f64,
    pub accuracy: Option<f64>,
    pub confusion: Option<ConfusionMatrix>,
    pub runtime_s: f64,
    pub config_digest: String,
}

impl MetricsReport {
    /// Digest of everything except the wall-clock runtime.
    pub fn digest(&self) -> String {
        let mut r = self.clone();
        r.runtime_s = 0.0;
        let text = serde_json::to_string(&r).expect("report serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub dataset: Dataset,
    pub weight: ReadoutWeight,
    pub cases: Vec<CaseResult>,
    pub report: MetricsReport,
    pub surface: Option<Vec<(f64, f64, usize)>>,
}

/// Run each of a case's messages through the kernel and join the
/// activations side by side.
pub fn simulate_inputs(
    cfg: &ExperimentConfig,
    reservoir: &ReservoirConfig,
    case_index: usize,
    inputs: &[Vec<f64>],
) -> Result<StateMatrix> {
    let parts = inputs
        .iter()
        .enumerate()
        .map(|(j, msg)| {
            let mut r = reservoir.clone();
            if let Some(n) = &mut r.noise {
                n.seed = derive_seed(cfg.master_seed, &[label::NOISE, case_index as u64, j as u64]);
            }
            run_case(msg, &r, &cfg.circuit)
        })
        .collect::<Result<Vec<_>>>()?;
    if parts.len() == 1 {
        Ok(parts.into_iter().next().expect("one part"))
    } else {
        StateMatrix::hconcat(&parts)
    }
}

fn simulate_indices(cfg: &ExperimentConfig, dataset: &Dataset, indices: &[usize]) -> Vec<Result<StateMatrix>> {
    let reservoir = cfg.effective_reservoir();
    indices
        .par_iter()
        .map(|&i| simulate_inputs(cfg, &reservoir, i, &dataset.inputs[i]))
        .collect()
}

pub fn build_dataset(cfg: &ExperimentConfig) -> Result<Dataset> {
    generate_dataset(
        &cfg.task,
        &cfg.lwe,
        cfg.n_cases,
        cfg.val_fraction,
        derive_seed(cfg.master_seed, &[label::DATA]),
    )
}

fn score(
    cfg: &ExperimentConfig,
    dataset: &Dataset,
    weight: &ReadoutWeight,
    states: Vec<(usize, Result<StateMatrix>)>,
    failures: &mut Vec<CaseFailure>,
) -> Result<Vec<CaseResult>> {
    let mut kept = Vec::new();
    let mut estimates = Vec::new();
    for (i, s) in states {
        match s.and_then(|x| weight.predict(&x)) {
            Ok(e) => {
                kept.push(i);
                estimates.push(e);
            }
            Err(e) => failures.push(CaseFailure {
                index: i,
                error: e.to_string(),
            }),
        }
    }
    if kept.is_empty() {
        return Err(Error::UndefinedMetric("every validation case failed".into()));
    }
    let targets: Vec<Vec<f64>> = kept.iter().map(|&i| dataset.teachers[i].clone()).collect();
    let scores = nmse(&estimates, &targets, cfg.nmse_cap)?;
    Ok(kept
        .iter()
        .enumerate()
        .map(|(k, &i)| CaseResult {
            index: i,
            target: targets[k].clone(),
            estimate: estimates[k].clone(),
            nmse: scores.per_case[k],
            zero_target: scores.zero_target[k],
            class: dataset.labels.as_ref().map(|l| l[i]),
            predicted: dataset.labels.as_ref().map(|_| classify(estimates[k][0])),
        })
        .collect())
}

fn report(
    cfg: &ExperimentConfig,
    n_train: usize,
    cases: &[CaseResult],
    failures: Vec<CaseFailure>,
    start: Instant,
) -> Result<MetricsReport> {
    let per_case: Vec<f64> = cases.iter().map(|c| c.nmse).collect();
    let confusion = if cfg.task.kind.is_classification() {
        let actual: Vec<usize> = cases.iter().filter_map(|c| c.class).collect();
        let predicted: Vec<usize> = cases.iter().filter_map(|c| c.predicted).collect();
        Some(ConfusionMatrix::new(&actual, &predicted, 2)?)
    } else {
        None
    };
    Ok(MetricsReport {
        task: cfg.task.kind,
        n_train,
        n_val: cases.len(),
        failures,
        mean_nmse: crate::reservoir::metrics::mean(&per_case),
        median_nmse: crate::reservoir::metrics::median(&per_case),
        nmse: per_case,
        accuracy: confusion.as_ref().map(ConfusionMatrix::accuracy),
        confusion,
        runtime_s: start.elapsed().as_secs_f64(),
        config_digest: cfg.digest(),
    })
}

/// Generate the dataset, simulate every case, train on the training split
/// and score the validation split. Failed cases are skipped and listed in
/// the report.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let start = Instant::now();
    cfg.validate()?;
    let dataset = build_dataset(cfg)?;
    let split = dataset.split.clone();
    let mut failures = Vec::new();

    let train_states = simulate_indices(cfg, &dataset, &split.train);
    let n_cols = train_states
        .iter()
        .find_map(|s| s.as_ref().ok().map(|m| m.n_cols))
        .ok_or(Error::EmptyTraining)?;
    let mut acc = Accumulator::new(n_cols, cfg.task.kind.n_outputs(), cfg.readout)?;
    let mut n_train = 0;
    for (&i, s) in split.train.iter().zip(train_states) {
        match s.and_then(|x| acc.add_case(&x, &dataset.teachers[i])) {
            Ok(()) => n_train += 1,
            Err(e) => failures.push(CaseFailure {
                index: i,
                error: e.to_string(),
            }),
        }
    }
    let mut weight = acc.solve()?;
    weight.seed = cfg.master_seed;
    weight.config_digest = cfg.digest();

    let val_states = simulate_indices(cfg, &dataset, &split.val);
    let cases = score(
        cfg,
        &dataset,
        &weight,
        split.val.iter().copied().zip(val_states).collect(),
        &mut failures,
    )?;

    let surface = match (&cfg.surface, cfg.task.kind) {
        (Some(grid), TaskKind::Circles) => {
            let reservoir = cfg.effective_reservoir();
            Some(decision_surface(grid, |x, y| {
                let m = simulate_inputs(cfg, &reservoir, usize::MAX, &cfg.task.circle_inputs(x, y))?;
                Ok(weight.predict(&m)?[0])
            })?)
        }
        _ => None,
    };

    let report = report(cfg, n_train, &cases, failures, start)?;
    Ok(ExperimentOutcome {
        config: cfg.clone(),
        dataset,
        weight,
        cases,
        report,
        surface,
    })
}

/// Score the validation split of `cfg`'s dataset with an existing weight.
pub fn evaluate(cfg: &ExperimentConfig, weight: &ReadoutWeight) -> Result<(Vec<CaseResult>, MetricsReport)> {
    let start = Instant::now();
    cfg.validate()?;
    let dataset = build_dataset(cfg)?;
    let val = dataset.split.val.clone();
    let states = simulate_indices(cfg, &dataset, &val);
    let mut failures = Vec::new();
    let cases = score(
        cfg,
        &dataset,
        weight,
        val.into_iter().zip(states).collect(),
        &mut failures,
    )?;
    let report = report(cfg, 0, &cases, failures, start)?;
    Ok((cases, report))
}

pub fn cases_csv(cases: &[CaseResult], digest: &str) -> CsvText {
    let n_out = cases.first().map_or(1, |c| c.target.len());
    let classified = cases.first().is_some_and(|c| c.class.is_some());
    let mut header: Vec<String> = vec!["case".into()];
    header.extend((0..n_out).map(|k| format!("target_{k}")));
    header.extend((0..n_out).map(|k| format!("estimate_{k}")));
    header.push("nmse".into());
    header.push("zero_target".into());
    if classified {
        header.push("class".into());
        header.push("predicted".into());
    }
    let mut csv = CsvText::new(&header.join(","), Some(digest));
    for c in cases {
        let mut row = vec![c.index.to_string()];
        row.extend(c.target.iter().map(|&x| fmt_f64(x)));
        row.extend(c.estimate.iter().map(|&x| fmt_f64(x)));
        row.push(fmt_f64(c.nmse));
        row.push(u8::from(c.zero_target).to_string());
        if let (Some(a), Some(p)) = (c.class, c.predicted) {
            row.push(a.to_string());
            row.push(p.to_string());
        }
        csv.row(row);
    }
    csv
}

pub fn surface_csv(points: &[(f64, f64, usize)], digest: &str) -> CsvText {
    let mut csv = CsvText::new("x,y,class", Some(digest));
    for &(x, y, c) in points {
        csv.row([fmt_f64(x), fmt_f64(y), c.to_string()]);
    }
    csv
}

/// Write dataset, per-case results, weight, report and effective config
/// under `dir`. Returns the written paths.
pub fn write_artifacts(outcome: &ExperimentOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    let digest = outcome.report.config_digest.as_str();
    let mut written = Vec::new();
    let mut put = |name: &str| {
        let p = dir.join(name);
        written.push(p.clone());
        p
    };
    match &outcome.dataset.lwe_cases {
        Some(cases) => crate::lwe::save_dataset(cases, &put("dataset.json"))?,
        None => outcome.dataset.to_csv(Some(digest)).save(&put("dataset.csv"))?,
    }
    cases_csv(&outcome.cases, digest).save(&put("cases.csv"))?;
    super::artifacts::save_weight(&outcome.weight, &put("weight.json"))?;
    write_json(&put("report.json"), &outcome.report)?;
    write_json(&put("config.json"), &outcome.config)?;
    if let Some(s) = &outcome.surface {
        surface_csv(s, digest).save(&put("surface.csv"))?;
    }
    if !outcome.report.failures.is_empty() {
        write_json(
            &put("failures.json"),
            &serde_json::json!({ "config_digest": digest, "failures": outcome.report.failures }),
        )?;
    }
    Ok(written)
}

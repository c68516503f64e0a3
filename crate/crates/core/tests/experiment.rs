use std::process::Command;

use chua_rc::harness::{load_weight, parse_config, run_experiment, with_jobs, write_artifacts, DigestCheck};
use chua_rc::io::CsvTable;

fn small_config(extra: &str) -> String {
    format!(r#"{{"n_cases": 40, "reservoir": {{"n_mask": 8}}{extra}}}"#)
}

#[test]
fn weight_roundtrip_reproduces_estimates() {
    let cfg = parse_config(&small_config("")).unwrap();
    let out = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_artifacts(&out, dir.path()).unwrap();

    let (w, check) = load_weight(&dir.path().join("weight.json"), Some(&cfg.digest())).unwrap();
    assert_eq!(check, DigestCheck::Match);
    assert_eq!(w, out.weight);
    let (cases, _) = chua_rc::harness::evaluate(&cfg, &w).unwrap();
    for (a, b) in cases.iter().zip(&out.cases) {
        assert_eq!(a.estimate, b.estimate);
    }

    let other = parse_config(&small_config(r#", "master_seed": 3"#)).unwrap();
    let (_, check) = load_weight(&dir.path().join("weight.json"), Some(&other.digest())).unwrap();
    assert_eq!(check, DigestCheck::Mismatch);
}

#[test]
fn report_mean_agrees_with_cases_csv() {
    let cfg = parse_config(&small_config(r#", "task": {"kind": "modulo"}"#)).unwrap();
    let out = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_artifacts(&out, dir.path()).unwrap();
    let table = CsvTable::read(&dir.path().join("cases.csv")).unwrap();
    assert_eq!(table.digest.as_deref(), Some(cfg.digest().as_str()));
    let nmse = table.column("nmse").unwrap();
    let mean = nmse.iter().sum::<f64>() / nmse.len() as f64;
    assert!((mean - out.report.mean_nmse).abs() < 1e-12);
    assert_eq!(nmse.len(), out.report.n_val);
}

#[test]
fn same_seed_same_bytes_any_worker_count() {
    let cfg = parse_config(&small_config(r#", "task": {"kind": "circles"}"#)).unwrap();
    let csv = |jobs| {
        let out = with_jobs(Some(jobs), || run_experiment(&cfg)).unwrap().unwrap();
        chua_rc::harness::cases_csv(&out.cases, &cfg.digest())
            .as_str()
            .to_owned()
    };
    let one = csv(1);
    assert_eq!(one, csv(3));
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chua-rc"))
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"reservoir": {"v_min": 2.0, "v_max": 1.0}}"#).unwrap();
    let status = cli().args(["train", "--config"]).arg(&bad).output().unwrap().status;
    assert_eq!(status.code(), Some(1));

    let missing = dir.path().join("nope.csv");
    let status = cli()
        .args(["plot", "--input"])
        .arg(&missing)
        .arg("--out")
        .arg(dir.path().join("x.svg"))
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(2));

    let good = dir.path().join("sim.json");
    std::fs::write(&good, r#"{"simulation": {"t_end": 0.001}}"#).unwrap();
    let out = dir.path().join("run");
    let status = cli()
        .args(["simulate", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    let trace = CsvTable::read(&out.join("trace.csv")).unwrap();
    assert_eq!(trace.header, ["t", "v_cd", "v_l"]);
    assert_eq!(trace.rows.len(), 10_000);
}

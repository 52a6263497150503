use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn cdseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdseq"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = cdseq(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn evaluate_json(path: &Path) -> Value {
    serde_json::from_str(&ok(&["evaluate", path.to_str().unwrap(), "--json"])).unwrap()
}

fn barker13() -> Value {
    let signs = [1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1];
    let indices: Vec<u32> = signs.iter().map(|&s| u32::from(s < 0)).collect();
    let phases: Vec<f64> = indices
        .iter()
        .map(|&j| std::f64::consts::PI * f64::from(j))
        .collect();
    json!({ "n": 13, "alphabet": "binary", "phases": phases, "indices": indices })
}

#[test]
fn design_frank_start_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&[
        "design",
        "--n",
        "9",
        "--starts",
        "frank,random:2",
        "--out-dir",
        d,
    ]);
    for f in ["sequence.json", "trace.csv", "report.json", "manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let report = read_json(&dir.path().join("report.json"));
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(report["manifest_sha256"], manifest["sha256"]);
    assert_eq!(report["runs"].as_array().unwrap().len(), 3);
    assert_eq!(manifest["seeds"], json!([0, 1]));

    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("start,label,step,objective,manifest"));
    assert!(lines.count() >= 3);
}

#[test]
fn frank_start_needs_square_length() {
    let dir = tempfile::tempdir().unwrap();
    let out = cdseq(&[
        "design",
        "--n",
        "10",
        "--starts",
        "frank",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("square"));
}

#[test]
fn evaluate_barker13() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("barker.json");
    std::fs::write(&path, barker13().to_string()).unwrap();
    let v = evaluate_json(&path);
    assert_eq!(v["n"], 13);
    assert!((v["psl"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["isl"].as_f64().unwrap() - 6.0).abs() < 1e-12);

    let acf = dir.path().join("acf.csv");
    ok(&[
        "evaluate",
        path.to_str().unwrap(),
        "--acf",
        acf.to_str().unwrap(),
    ]);
    let rows = std::fs::read_to_string(acf).unwrap().lines().count();
    assert!(rows >= 13, "acf table has {rows} lines");
}

#[test]
fn evaluate_rejects_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.json");
    std::fs::write(
        &path,
        json!({ "n": 5, "alphabet": "continuous", "phases": [0.0, 1.0, 2.0] }).to_string(),
    )
    .unwrap();
    let out = cdseq(&["evaluate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("phases"));

    let missing = dir.path().join("missing.json");
    assert_eq!(
        cdseq(&["evaluate", missing.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn evaluate_reproduces_design_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&[
        "design",
        "--n",
        "20",
        "--alphabet",
        "m:16",
        "--theta",
        "0.5",
        "--starts",
        "random:2",
        "--out-dir",
        d,
    ]);
    let report = read_json(&dir.path().join("report.json"));
    let v = evaluate_json(&dir.path().join("sequence.json"));
    assert_eq!(v["psl"], report["best_psl"]);
    assert_eq!(v["isl"], report["best_isl"]);
    assert_eq!(v["psl_db"], report["best_psl_db"]);
    assert_eq!(v["isl_db"], report["best_isl_db"]);
}

#[test]
fn pareto_sweep_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&[
        "pareto",
        "--n",
        "16",
        "--thetas",
        "1.0,0.5,0.0",
        "--starts",
        "golomb,random:1",
        "--out-dir",
        d,
    ]);
    let csv = std::fs::read_to_string(dir.path().join("pareto.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|&h| h == name).unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let v = evaluate_json(&dir.path().join(row[col("sequence")]));
        assert_eq!(
            v["psl"].as_f64().unwrap(),
            row[col("psl")].parse::<f64>().unwrap()
        );
        assert_eq!(
            v["isl"].as_f64().unwrap(),
            row[col("isl")].parse::<f64>().unwrap()
        );
    }
}

#[test]
fn pareto_rejects_increasing_thetas() {
    let dir = tempfile::tempdir().unwrap();
    let out = cdseq(&[
        "pareto",
        "--n",
        "16",
        "--thetas",
        "0.0,0.5",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_rejects_empty_grid() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(
        cdseq(&["bench", "--n-grid", "", "--out-dir", d])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cdseq(&["bench", "--n-grid", "8", "--m-grid", ",", "--out-dir", d])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bench_is_deterministic() {
    let run = |threads: &str| {
        let dir = tempfile::tempdir().unwrap();
        ok(&[
            "--threads",
            threads,
            "bench",
            "--n-grid",
            "8,13",
            "--m-grid",
            "2,continuous",
            "--metric",
            "isl",
            "--runs",
            "2",
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        std::fs::read(dir.path().join("bench.csv")).unwrap()
    };
    let a = run("1");
    assert_eq!(a, run("2"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("n,alphabet,metric,theta,runs,best_psl"));
}

#[test]
fn design_is_deterministic() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        ok(&[
            "design",
            "--n",
            "12",
            "--alphabet",
            "binary",
            "--starts",
            "random:3",
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        (
            std::fs::read(dir.path().join("sequence.json")).unwrap(),
            std::fs::read(dir.path().join("trace.csv")).unwrap(),
        )
    };
    assert_eq!(run(), run());
}

use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut argv = vec!["linecluster"];
    argv.extend_from_slice(args);
    let code = linecluster_cli::run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn run_json(args: &[&str]) -> Value {
    let (code, out) = run(args);
    assert_eq!(code, 0, "{args:?}");
    serde_json::from_str(&out).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_header_and_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d");
    let v = run_json(&["gen", "--n", "100", "--sigma", "0.01", "--seed", "7", "--out", s(&d)]);
    assert_eq!(v["schema_version"], 1);
    assert!(v["ham_star"].is_null());
    let text = std::fs::read_to_string(d.join("points.csv")).unwrap();
    assert_eq!(text.lines().count(), 101);
    assert_eq!(text.lines().next(), Some("x,y,z"));
    let params: Value = serde_json::from_str(&std::fs::read_to_string(d.join("params.json")).unwrap()).unwrap();
    for key in ["alpha", "half_length", "sigma", "n_points", "seed"] {
        assert!(params.get(key).is_some(), "{key}");
    }
}

#[test]
fn gen_from_params_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_json(&["gen", "--n", "50", "--sigma", "0.02", "--seed", "3", "--out", s(&a)]);
    run_json(&["gen", "--params", s(&a.join("params.json")), "--out", s(&b)]);
    assert_eq!(std::fs::read(a.join("points.csv")).unwrap(), std::fs::read(b.join("points.csv")).unwrap());
}

#[test]
fn cluster_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d");
    run_json(&["gen", "--n", "100", "--sigma", "0.01", "--seed", "7", "--out", s(&d)]);
    let input = d.join("points.csv");
    let first = run(&["cluster", "--in", s(&input), "--t", "0.05", "--seed", "7"]);
    let second = run(&["cluster", "--in", s(&input), "--t", "0.05", "--seed", "7"]);
    assert_eq!(first.0, 0);
    assert_eq!(first, second);
    let v: Value = serde_json::from_str(&first.1).unwrap();
    assert!(v["ham_star"].as_u64().unwrap() <= 50);
    assert_eq!(v["davis_kahan"]["holds"], true);
}

#[test]
fn cluster_writes_labels_and_w() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d");
    run_json(&["gen", "--n", "30", "--sigma", "0.0", "--seed", "1", "--out", s(&d)]);
    let v = run_json(&["cluster", "--in", s(&d.join("points.csv")), "--t", "1e-6", "--out", s(&d), "--dump-w"]);
    assert_eq!(v["ham_star"], 0);
    let labels = std::fs::read_to_string(d.join("labels.csv")).unwrap();
    assert_eq!(labels.lines().next(), Some("index,z_hat"));
    assert_eq!(labels.lines().count(), 31);
    let w = std::fs::read_to_string(d.join("w.csv")).unwrap();
    assert_eq!(w.lines().next(), Some("i,j,count"));
}

#[test]
fn autocluster_reports_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d");
    run_json(&["gen", "--n", "120", "--sigma", "0.01", "--seed", "2", "--out", s(&d)]);
    let v = run_json(&["autocluster", "--in", s(&d.join("points.csv")), "--m", "8", "--seed", "2"]);
    assert!(v["t_star"].as_f64().unwrap() > 0.0);
    assert_eq!(v["theta"], 0.25);
    assert_eq!(v["k"], 2);
    assert!(v["restricted"]["ham_star"].is_u64());
}

#[test]
fn recover_lines_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d");
    run_json(&["gen", "--n", "400", "--sigma", "0.01", "--seed", "4", "--out", s(&d)]);
    let params = d.join("params.json");
    let v = run_json(&["recover-lines", "--in", s(&d.join("points.csv")), "--params", s(&params)]);
    for c in v["clusters"].as_array().unwrap() {
        assert!(c["sin_angle_error"].as_f64().unwrap() < 0.05);
        assert!(c["center_error"].as_f64().unwrap() < 0.1);
    }
    let v = run_json(&["oracle", "--params", s(&params), "--in", s(&d.join("points.csv")), "--out", s(&d)]);
    assert!((v["asymptote"].as_f64().unwrap() - 0.398942).abs() < 1e-6);
    assert!(v["empirical_error"].as_f64().unwrap() < 0.05);
    assert!(d.join("labels.csv").exists());
}

#[test]
fn bounds_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let v = run_json(&["bounds", "--samples", "20000", "--seed", "1", "--out", s(dir.path())]);
    let text = std::fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("bound_name,params,theory,mc_estimate,mc_se,pass"));
    assert_eq!(text.lines().count() as u64, 1 + v["checks"].as_u64().unwrap());
}

#[test]
fn sweep_grid_produces_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(&config, r#"{"n_points": [20, 30], "sigma": [0.001, 0.01], "t": [0.05], "trials": 3, "seed": 11}"#).unwrap();
    let v = run_json(&["sweep", "--config", s(&config), "--out", s(dir.path())]);
    assert_eq!(v["rows"], 12);
    let mut r = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, linecluster_cli::sweep::SWEEP_HEADER);
    assert_eq!(r.records().count(), 12);
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linecluster"))
}

#[test]
fn exit_codes() {
    let usage = bin().args(["cluster", "--t", "0.1"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("--in"));
    let bad_flag = bin().args(["gen", "--bogus"]).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_flag.stderr).contains("--bogus"));
    let runtime = bin().args(["cluster", "--in", "/nonexistent.csv", "--t", "0.1"]).output().unwrap();
    assert_eq!(runtime.status.code(), Some(1));
    let bad_alpha = bin().args(["gen", "--alpha", "4", "--out", "/tmp/unused-linecluster"]).output().unwrap();
    assert_eq!(bad_alpha.status.code(), Some(1));
}

#[test]
fn tls_score_reads_stdin_csv() {
    let mut child = bin().arg("tls-score").stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(b"x,y\n0,0\n1,0\n0.5,0.3\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["sigma_tls_sq"].as_f64().unwrap() - 0.06).abs() < 1e-12);
    let v = run_json(&["tls-score", "0,0", "1,0", "-2,0"]);
    assert!(v["sigma_tls_sq"].as_f64().unwrap().abs() < 1e-12);
}

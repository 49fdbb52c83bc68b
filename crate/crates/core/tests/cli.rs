use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use freeknot::io::FitReport;

fn freeknot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeknot")).args(args).output().unwrap()
}

fn write_series(dir: &Path, name: &str, values: &[f64]) -> String {
    let path = dir.join(name);
    let text: String = values.iter().map(|v| format!("{v}\n")).collect();
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn step_data() -> Vec<f64> {
    vec![0.1, -0.1, 0.05, 0.0, 3.1, 2.9, 3.0, 3.05, 2.95, 3.0]
}

fn check_report(report: &FitReport, y: &[f64]) {
    let theta = report.evaluate().unwrap();
    for (a, b) in theta.iter().zip(&report.theta_hat) {
        assert!((a - b).abs() < 1e-9);
    }
    let sse: f64 = y.iter().zip(&theta).map(|(a, b)| (a - b) * (a - b)).sum();
    assert!((sse - report.sse).abs() < 1e-9);
}

#[test]
fn fit_prints_a_two_piece_report() {
    let dir = tempfile::tempdir().unwrap();
    let y = step_data();
    let input = write_series(dir.path(), "y.csv", &y);
    let out = freeknot(&["fit", "--input", &input, "--d", "0", "--d0", "-1", "--k", "2", "--solver", "dp"]);
    assert!(out.status.success());
    let report: FitReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.knots, vec![0, 4, 10]);
    assert_eq!(report.pieces.len(), 2);
    check_report(&report, &y);

    let out = freeknot(&["fit", "--input", &input, "--d", "0", "--k", "2", "--solver", "exhaustive"]);
    let exh: FitReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!((exh.sse - report.sse).abs() < 1e-12);
}

#[test]
fn adapt_reports_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let y = step_data();
    let input = write_series(dir.path(), "y.csv", &y);
    let out_path = dir.path().join("fit.json");
    let status = freeknot(&[
        "adapt", "--input", &input, "--d", "0", "--k-max", "3", "--sigma", "0.1", "--out",
        out_path.to_str().unwrap(),
    ])
    .status;
    assert!(status.success());
    let report: FitReport = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report.k_selected, 2);
    let trace = report.trace.as_ref().unwrap();
    assert_eq!(trace.len(), 3);
    assert_eq!(report.penalty_used, Some(trace[1].penalty));
    check_report(&report, &y);
}

#[test]
fn shapefit_reports_a_pivot() {
    let dir = tempfile::tempdir().unwrap();
    let y: Vec<f64> = (0..12).map(|t| ((t as f64) - 5.0).abs() + 0.1 * (t % 3) as f64).collect();
    let input = write_series(dir.path(), "y.txt", &y);
    let out = freeknot(&["shapefit", "--input", &input, "--d", "1", "--k", "3"]);
    assert!(out.status.success());
    let report: FitReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.pivot.is_some() && report.canonical.is_some());
    check_report(&report, &y);
}

#[test]
fn sparse_emits_the_hat() {
    let out = freeknot(&["sparse", "--d", "1", "--d0", "0", "--k", "4"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["nullspace_dim"], 1);
    assert_eq!(v["signal"]["member"], true);
    let theta: Vec<f64> = serde_json::from_value(v["signal"]["theta"].clone()).unwrap();
    let n = theta.len();
    let peak = theta.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap().0;
    assert_eq!(peak + 1, n / 2);
}

#[test]
fn mc_risk_writes_one_row_per_n() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("risk.csv");
    let status = freeknot(&[
        "mc-risk", "--d", "0", "--d0", "-1", "--k", "2", "--n-grid", "64,128,256", "--reps", "5", "--seed", "7",
        "--signal", "sparse_boxcar", "--out", out.to_str().unwrap(),
    ])
    .status;
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,k,d,d0,estimator,mean_risk,std_error,rate_loglog,rate_log,reps,seed");
    assert_eq!(lines.len(), 4);
}

#[test]
fn lil_and_width_headers() {
    let out = freeknot(&["lil", "--d", "0", "--n-grid", "16,32", "--reps", "3", "--seed", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,d,mean_Z2,std_error,loglog16n,reps,seed\n"));
    let out = freeknot(&["width", "--d", "0", "--k", "2", "--n-grid", "16,32", "--reps", "3", "--seed", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,d,d0,k,mean_width,std_error,loglog16n,log_en,reps,seed\n"));
}

#[test]
fn checks_report_shape() {
    let out = freeknot(&["checks", "--suite", "dof"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["suite", "instances", "min_ratio", "max_residual", "pass"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["pass"], true);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let y: Vec<f64> = (0..60).map(|t| (t as f64 * 0.37).sin()).collect();
    let input = write_series(dir.path(), "y.csv", &y);

    // Budget refusal.
    let out = freeknot(&["fit", "--input", &input, "--d", "1", "--d0", "0", "--k", "4", "--solver", "exhaustive", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));

    // Validation errors.
    assert_eq!(freeknot(&["fit", "--input", &input, "--d", "0", "--k", "2", "--bogus"]).status.code(), Some(1));
    assert_eq!(freeknot(&["fit", "--input", "/nonexistent/y.csv", "--d", "0", "--k", "2"]).status.code(), Some(1));
    assert_eq!(freeknot(&["fit", "--input", &input, "--d", "1", "--d0", "0", "--k", "2"]).status.code(), Some(1));
    let out = freeknot(&["lil", "--d", "0", "--n-grid", "16", "--reps", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,5.0\n3,6.0\n").unwrap();
    let out = freeknot(&["fit", "--input", bad.to_str().unwrap(), "--d", "0", "--k", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const LINF: &str = r#"{"kind":"linf","dim":2}"#;
const SHIFTED: &str = r#"{"kind":"shifted_l1","dim":2,"params":{"c":1.0}}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polargauge")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn instance() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/bp_5x12.json")
        .to_string_lossy()
        .into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn envelope_linf_at_three_one() {
    let out = run(&["envelope", "--gauge", LINF, "--x", "3,1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v["prox"]["value"].as_f64().unwrap() - 1.5).abs() <= 1e-12);
    let grad: Vec<f64> = serde_json::from_value(v["gradient"]["gradient"].clone()).unwrap();
    assert!((grad[0] - 0.5).abs() <= 1e-12 && grad[1].abs() <= 1e-12);
}

#[test]
fn envelope_at_origin_reports_missing_gradient() {
    let out = run(&["envelope", "--gauge", LINF, "--x=0,0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["prox"]["value"].as_f64().unwrap(), 0.0);
    assert!(v["gradient"].is_null());
    assert!(v["gradient_note"].is_string());
}

#[test]
fn envelope_gauge_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, r#"{"kind":"l2","dim":2}"#).unwrap();
    let out = run(&["envelope", "--gauge", s(&path), "--x", "3,4"]);
    assert_eq!(code(&out), 0);
    assert!((json(&out)["prox"]["value"].as_f64().unwrap() - 2.5).abs() <= 1e-12);
}

fn contour_rows(text: &str) -> Vec<[f64; 5]> {
    text.lines()
        .skip(1)
        .map(|line| {
            let v: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3], v[4]]
        })
        .collect()
}

#[test]
fn contour_grid_is_deterministic_and_homogeneous() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let out = run(&["contour", "--gauge", LINF, "--alpha", "1", "--resolution", "101", "--out", s(p)]);
        assert_eq!(code(&out), 0);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.as_bytes(), std::fs::read(&b).unwrap().as_slice());
    assert!(text.starts_with("x1,x2,kappa,moreau_envelope,polar_envelope\n"));

    let rows = contour_rows(&text);
    assert_eq!(rows.len(), 101 * 101);
    let at = |i: usize, j: usize| rows[i * 101 + j];
    assert_eq!(&at(50, 50)[2..], &[0.0, 0.0, 0.0]);
    // grid index 50 + d sits at 0.03 d, so index 50 + 2d is the doubled point
    for di in -25i64..=25 {
        for dj in -25i64..=25 {
            let p = at((50 + di) as usize, (50 + dj) as usize);
            let q = at((50 + 2 * di) as usize, (50 + 2 * dj) as usize);
            assert!((q[4] - 2.0 * p[4]).abs() <= 1e-12 * (1.0 + q[4]), "{p:?} {q:?}");
        }
    }
}

#[test]
fn contour_rejects_non_planar_gauge() {
    let out = run(&["contour", "--gauge", r#"{"kind":"linf","dim":3}"#]);
    assert_eq!(code(&out), 1);
}

#[test]
fn bp_solve_bundled_instance() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = run(&["bp-solve", "--instance", &instance(), "--trace", s(&trace)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let product = v["gauge_dual"]["duality_product"].as_f64().unwrap();
    assert!((product - 1.0).abs() <= 1e-5);
    assert!(v.get("lagrange").is_none());
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("iter,objective,step,grad_norm\n"));
}

#[test]
fn bp_solve_compare_runs_both_solvers() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let report = dir.path().join("report.json");
    let out = run(&["bp-solve", "--instance", &instance(), "--compare", "--trace", s(&trace), "--out", s(&report)]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let gd: Vec<f64> = serde_json::from_value(v["gauge_dual"]["primal_solution"].clone()).unwrap();
    let lg: Vec<f64> = serde_json::from_value(v["lagrange"]["primal_solution"].clone()).unwrap();
    assert_eq!(gd.len(), lg.len());
    assert!(dir.path().join("trace_lagrange.csv").exists());
}

#[test]
fn lagrange_solve_runs_baseline_first() {
    let out = run(&["lagrange-solve", "--instance", &instance()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["lagrange"]["converged"], Value::Bool(true));
    assert!(v["lagrange"]["duality_product"].is_null());
}

#[test]
fn bp_solve_zero_cap_is_non_convergence() {
    let out = run(&["bp-solve", "--instance", &instance(), "--max-iter", "0"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["gauge_dual"]["converged"], Value::Bool(false));
}

#[test]
fn malformed_instance_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"b\": [1, 2,\n").unwrap();
    let out = run(&["bp-solve", "--instance", s(&path)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn p4a_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("p4a.csv");
    let out = run(&["p4a", "--function", SHIFTED, "--x0", "2,-1", "--trace", s(&trace)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["monotone"], Value::Bool(true));
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("iter,p_value,step_gap,lambda\n"));
}

#[test]
fn p4a_seeded_start_is_reproducible() {
    let a = run(&["p4a", "--function", SHIFTED, "--seed", "7"]);
    let b = run(&["p4a", "--function", SHIFTED, "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn p4a_cap_is_non_convergence() {
    let out = run(&["p4a", "--function", SHIFTED, "--x0", "2,-1", "--max-iter", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn ema_converges_on_shifted_l1() {
    let out = run(&["ema", "--function", SHIFTED, "--x0", "2,-1", "--beta", "1,0.5"]);
    assert_eq!(code(&out), 0);
    let cand: Vec<f64> = serde_json::from_value(json(&out)["candidate"].clone()).unwrap();
    assert!(cand.iter().map(|c| c.abs()).sum::<f64>() <= 1e-4);
}

#[test]
fn ema_rejects_bad_sigma() {
    let out = run(&["ema", "--function", SHIFTED, "--sigma", "1.5"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn check_envelope_includes_finite_differences() {
    let out = run(&["check", "envelope"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("gradient vs finite differences"));
}

#[test]
fn check_report_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("check.json");
    let out = run(&["check", "duality", "--seed", "3", "--out", s(&path)]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!v["items"].as_array().unwrap().is_empty());
}

#[test]
fn tight_tolerance_override_fails_checks() {
    let out = run(&["check", "envelope", "--tol-override", "gradient=1e-300"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["check", "envelope", "--tol-override", "root=-1"][..],
        &["check", "envelope", "--tol-override", "bogus=1"],
        &["check", "nothing"],
        &["frobnicate"],
        &["envelope", "--gauge", LINF, "--x", "3,1", "--alpha", "0"],
        &["envelope", "--gauge", r#"{"kind":"l2","dim":2,"extra":1}"#, "--x", "1,1"],
    ] {
        assert_eq!(code(&run(args)), 1, "{args:?}");
    }
}

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn herglotz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_herglotz")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_writes_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = herglotz(&["verify", "--suite", "theorem_l,prop_recovery", "--dim", "3", "--degree", "6", "--samples", "3", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert!(report.as_array().unwrap().iter().all(|r| r["verdict"] == "pass"));
    assert!(fs::read_to_string(dir.path().join("report.md")).unwrap().contains("theorem_l"));

    let o = herglotz(&["report", dir.path().join("report.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("prop_recovery_converge"));
}

#[test]
fn failing_tolerance_exits_one() {
    let o = herglotz(&["verify", "--suite", "theorem_l", "--dim", "2", "--degree", "6", "--samples", "3", "--tol", "theorem_l_spread=1.0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"samples": 0}"#).unwrap();
    assert_eq!(herglotz(&["verify", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(herglotz(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(herglotz(&["verify", "--tol", "nope=1"]).status.code(), Some(2));
    assert_eq!(herglotz(&["verify", "--degree", "0"]).status.code(), Some(2));
    assert_eq!(herglotz(&["bogus"]).status.code(), Some(2));
    assert_eq!(herglotz(&["report", dir.path().join("missing.json").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn config_file_drives_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"dims": [2], "max_degree": 4, "samples": 2, "suites": ["theorem_s"], "grids": {"theorem_s": [1.0]}}"#).unwrap();
    let o = herglotz(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("theorem_s | alpha=1, d=2"));
    assert!(!table.contains("alpha=0.5"));
}

#[test]
fn eval_matches_constant_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("phi.json");
    let pts = dir.path().join("pts.json");
    fs::write(&spec, r#"{"dim": 3, "max_degree": 0, "coeffs": [[0, 1, 1.0, 0.0]]}"#).unwrap();
    fs::write(&pts, "[[0.5, 0.0, 0.0], [1.0, 2.0, 2.0]]").unwrap();
    let o = herglotz(&["eval", "--spectrum", spec.to_str().unwrap(), "--points", pts.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = json(&o);
    for (row, r) in rows.as_array().unwrap().iter().zip([0.5f64, 3.0]) {
        let want = (4.0 * std::f64::consts::PI).sqrt() * r.sin() / r;
        assert!((row["re"].as_f64().unwrap() - want).abs() < 1e-12);
        assert_eq!(row["im"].as_f64().unwrap(), 0.0);
    }
    fs::write(&pts, "[[1.0, 2.0]]").unwrap();
    assert_eq!(herglotz(&["eval", "--spectrum", spec.to_str().unwrap(), "--points", pts.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn norms_reports_all_fields() {
    let o = herglotz(&["norms", "--dim", "3", "--degree", "4", "--alpha", "-0.5", "--s", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    for k in ["H_alpha", "norm_alpha", "A_norm", "L_limit"] {
        assert!(v[k].as_f64().unwrap() > 0.0, "{k}");
    }
    assert!(v["A_norm"].as_f64().unwrap() >= v["L_limit"].as_f64().unwrap());
}

#[test]
fn bessel_table_approaches_one_over_pi() {
    let o = herglotz(&["bessel", "--mu", "0.5,1", "--radius", "2000", "--i3"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = json(&o);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let avg = row["average"].as_f64().unwrap();
        assert!((std::f64::consts::PI * avg - 1.0).abs() < 0.02);
        assert!(row["i3"].as_f64().unwrap() > 0.0);
    }
    assert_eq!(herglotz(&["bessel", "--mu=-1"]).status.code(), Some(2));
}

#[test]
fn same_seed_same_output() {
    let a = herglotz(&["verify", "--suite", "theorem_k", "--dim", "3", "--degree", "5", "--samples", "2", "--seed", "42"]);
    let b = herglotz(&["verify", "--suite", "theorem_k", "--dim", "3", "--degree", "5", "--samples", "2", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
}

use std::path::Path;
use std::process::Command;

use parker::cli::main_with_args;

fn run(args: &[&str], out: &Path) -> i32 {
    let mut all = vec!["parker"];
    all.extend_from_slice(args);
    let out = out.to_str().unwrap().to_string();
    all.extend_from_slice(&["--out", &out]);
    main_with_args(all)
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn equilibrium_writes_profile_and_residual() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(&["equilibrium", "--preset", "uniform-g0"], d.path()), 0);
    let rep = json(&d.path().join("equilibrium.json"));
    assert_eq!(rep["balanced"], true);
    let csv = std::fs::read_to_string(d.path().join("profile.csv")).unwrap();
    assert!(csv.starts_with("x,rho,drho,pressure"));
    assert_eq!(csv.lines().count(), 129);
    assert!(d.path().join("effective_config.toml").exists());
}

#[test]
fn verdict_reports_branch_flags() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(&["verdict", "--preset", "tserkovnikov-layer", "--n", "48", "--harmonics", "3"], d.path()), 0);
    let v = json(&d.path().join("verdict.json"));
    assert_eq!(v["tserkovnikov_branch"], true);
    assert_eq!(v["consistent"], true);
    assert!(v["max_growth"].as_f64().unwrap() > 0.0);
    let csv = std::fs::read_to_string(d.path().join("dispersion.csv")).unwrap();
    assert!(csv.starts_with("xi1,xi2,re_lambda,im_lambda,method,residual\n"));
}

#[test]
fn invalid_input_exits_with_one() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(&["scan", "--preset", "uniform-g0", "--n", "16", "--xi1-values", ""], d.path()), 1);
    assert_eq!(run(&["growth", "--preset", "uniform-g0", "--profile-file", "missing.txt"], d.path()), 1);
    assert_eq!(run(&["growth", "--preset", "uniform-g0", "--gamma=-1"], d.path()), 1);
    assert_eq!(run(&["growth", "--profile-file", "/nonexistent/table.txt"], d.path()), 1);
}

#[test]
fn rerun_from_echo_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(run(&["scan", "--preset", "schwarzschild-exp", "--n", "24", "--harmonics", "3"], a.path()), 0);
    let echo = a.path().join("effective_config.toml");
    assert_eq!(main_with_args(["parker", "run", "--config", echo.to_str().unwrap(), "--out", b.path().to_str().unwrap()]), 0);
    for f in ["dispersion.csv", "summary.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn growth_and_evolve_outputs() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run(&["growth", "--preset", "schwarzschild-exp", "--n", "32", "--xi1", "0.25", "--xi2", "1"], d.path()), 0);
    let g = json(&d.path().join("growth.json"));
    let qep = g["qep"]["top"]["re"].as_f64().unwrap();
    let fp = g["fixed_point"]["lambda"].as_f64().unwrap();
    assert!(qep > 0.0 && (qep - fp).abs() < 1e-8 * qep);
    assert!(std::fs::read_to_string(d.path().join("eigenfunction.csv")).unwrap().starts_with("component,x,value"));

    let e = tempfile::tempdir().unwrap();
    let args = ["evolve", "--preset", "uniform-g0", "--n", "16", "--xi1", "1", "--xi2", "0", "--init", "random", "--t-end", "5", "--samples", "50"];
    assert_eq!(run(&args, e.path()), 0);
    let csv = std::fs::read_to_string(e.path().join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,amplitude\n"));
    assert!(json(&e.path().join("evolve.json"))["div_drift"].as_f64().unwrap() < 1e-8);
    // the stable preset has no eigenmode to lift
    let f = tempfile::tempdir().unwrap();
    assert_eq!(run(&["evolve", "--preset", "uniform-g0", "--n", "16", "--xi1", "1", "--xi2", "0"], f.path()), 1);
}

#[test]
fn json_format_and_tabulated_profile() {
    let d = tempfile::tempdir().unwrap();
    let table = d.path().join("rho.txt");
    let rows: String = (0..=20).map(|i| format!("{} {}\n", i as f64 * 0.1, (-(i as f64) * 0.1).exp())).collect();
    std::fs::write(&table, rows).unwrap();
    let out = d.path().join("out");
    assert_eq!(run(&["criteria", "--profile-file", table.to_str().unwrap(), "--n", "32", "--g", "2", "--format", "json"], &out), 0);
    let rows = json(&out.join("criteria.json"));
    assert!(rows["xi3d"].as_f64().unwrap() >= 0.0);
    let cfg = std::fs::read_to_string(out.join("effective_config.toml")).unwrap();
    assert!(cfg.contains("lo = 0.0") && cfg.contains("hi = 2.0"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_parker");
    let d = tempfile::tempdir().unwrap();
    let ok = Command::new(bin).args(["criteria", "--preset", "rt-tanh", "--n", "16", "--out"]).arg(d.path()).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["scan", "--out"]).arg(d.path()).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("profile"));
    let list = Command::new(bin).arg("presets").output().unwrap();
    assert!(String::from_utf8_lossy(&list.stdout).contains("tserkovnikov-layer"));
}

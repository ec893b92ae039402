use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_finsler-ceq"))
}

fn job(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = bin().args(args).env_remove("FINSLER_CEQ_THREADS").output().unwrap();
    let code = out.status.code().unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, report)
}

#[test]
fn synth_recovers_rho_star() {
    let (code, r) = run(&["synth", job("synth_randers.toml").to_str().unwrap()]);
    assert_eq!(code, 0);
    let s = &r["result"]["synth"];
    assert_eq!(s["outcome"]["status"], "UNIQUE");
    assert!(s["recovery_error"].as_f64().unwrap() <= 1e-7);
    assert_eq!(r["tool"], "finsler-ceq-cli");
    assert!(r["wall_time_ms"].as_f64().is_some());
}

#[test]
fn solve_euclidean_is_indeterminate() {
    let (code, r) = run(&["solve", job("solve_euclidean.toml").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["solve"]["status"], "RIEMANNIAN_INDETERMINATE");
    assert_eq!(r["result"]["solve"]["nullspace_dim"], 3);
}

#[test]
fn solve_germ_reports_the_derivation() {
    let (code, r) = run(&["solve", job("solve_germ3.toml").to_str().unwrap()]);
    assert_eq!(code, 0);
    let o = &r["result"]["solve"];
    assert_eq!(o["status"], "UNIQUE");
    assert!(o["epsilon_used"].as_f64().is_some());
    assert!(o["pivot"]["i"].as_u64().is_some());
    assert_eq!(o["base_v"].as_array().unwrap().len(), 3);
    let rho: Vec<f64> = serde_json::from_value(o["rho"].clone()).unwrap();
    for (a, b) in rho.iter().zip([0.3, -0.1, 0.2]) {
        assert!((a - b).abs() <= 1e-7);
    }
}

#[test]
fn incompatible_germ_fails_check_and_solve() {
    let path = job("check_incompatible.toml");
    let (code, r) = run(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let c = &r["result"]["check"];
    assert_eq!(c["passed"], false);
    assert!(c["intrinsic"]["worst_residual"].as_f64().unwrap() > 1e-4);
    assert_eq!(c["intrinsic"]["worst_triple"].as_array().unwrap().len(), 3);
    assert_eq!(c["intrinsic"]["v"].as_array().unwrap().len(), 3);

    let (code, r) = run(&["solve", path.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(r["result"]["solve"]["status"], "INSOLVABLE");
}

#[test]
fn analyze_reads_json_and_averages() {
    let (code, r) = run(&["analyze", job("analyze_randers.json").to_str().unwrap(), "--samples", "40"]);
    assert_eq!(code, 0);
    let c = &r["result"]["analyze"];
    assert_eq!(c["samples"], 40);
    assert_eq!(c["rank_anomalies"], 0);
    assert!(c["vertical"].as_u64().unwrap() >= 2);
    assert_eq!(c["vertical_not_horizontal"], 0);
    assert!(c["averaged"]["normal_deviation"].as_f64().unwrap() > 0.0);
    assert!(c["min_hessian_eigenvalue"].as_f64().unwrap() > 0.0);
}

#[test]
fn flags_override_and_out_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let status = bin()
        .args(["solve", job("solve_germ3.toml").to_str().unwrap(), "--seed", "11", "--threads", "2"])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["config"]["solver"]["seed"], 11);
    assert_eq!(r["config"]["solver"]["n_sphere_samples"], 96);
}

#[test]
fn invalid_configs_exit_with_their_own_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "point = [0.0]\n[metric]\nkind = \"randers\"\na = [[1.0, 0.0], [0.0, 1.0]]\nb = [0.5, 0.0]\n").unwrap();
    let out = bin().args(["solve", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`point`"));

    let out = bin().args(["solve", job("synth_randers.toml").to_str().unwrap(), "--samples", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`solver`"));

    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["solve", "/nonexistent/job.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn identical_runs_match_except_for_timing() {
    let path = job("solve_germ3.toml");
    let (_, mut a) = run(&["solve", path.to_str().unwrap(), "--threads", "1"]);
    let (_, mut b) = run(&["solve", path.to_str().unwrap(), "--threads", "4"]);
    a["wall_time_ms"] = Value::Null;
    b["wall_time_ms"] = Value::Null;
    assert_eq!(a, b);
}

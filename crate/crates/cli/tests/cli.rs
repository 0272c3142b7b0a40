//! End-to-end tests that drive the compiled `priorcs` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_priorcs"));
    // pin the worker count so byte-level comparisons are scheduler-independent
    cmd.env("PRIORCS_THREADS", "1");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn priorcs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "`priorcs {}` failed:\n{}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 stdout")
}

/// Writes a small instance file and returns its path.
fn small_instance(dir: &tempfile::TempDir) -> PathBuf {
    let path = dir.path().join("instance.json");
    stdout_of(&[
        "gen",
        "--n",
        "24",
        "--s",
        "4",
        "--z-sparsity",
        "3",
        "--overlap",
        "2",
        "--seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    path
}

#[test]
fn gen_is_deterministic_and_respects_scale() {
    let args = ["gen", "--n", "30", "--s", "5", "--z-sparsity", "4", "--overlap", "2", "--seed", "9"];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second, "same seed must reproduce the same instance bytes");

    let parsed: Value = serde_json::from_str(&first).expect("instance JSON");
    assert_eq!(parsed["spec"]["n"], 30);
    assert_eq!(parsed["x_star"].as_array().unwrap().len(), 30);
    assert_eq!(parsed["w"].as_array().unwrap().len(), 30);
    let nonzeros = parsed["x_star"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v.as_f64().unwrap() != 0.0)
        .count();
    assert_eq!(nonzeros, 5);

    let paper = stdout_of(&["gen", "--paper-scale", "--seed", "1"]);
    let parsed: Value = serde_json::from_str(&paper).expect("instance JSON");
    assert_eq!(parsed["spec"]["n"], 1000);
    assert_eq!(parsed["spec"]["s"], 70);
}

#[test]
fn bounds_emits_the_documented_header_and_parses() {
    let dir = tempfile::tempdir().unwrap();
    let instance = small_instance(&dir);
    let csv = stdout_of(&["bounds", "--instance", instance.to_str().unwrap(), "--betas", "0.8,1"]);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("beta,case,condition_holds,width_sq,m_noiseless,m_noisy"),
        "header is part of the tool's contract"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.len() >= 4, "expected CS plus prior-aware rows, got {rows:?}");
    assert_eq!(rows[0][1], "CS");
    for row in &rows {
        assert_eq!(row.len(), 6);
        row[0].parse::<f64>().expect("beta cell");
        assert!(row[2] == "0" || row[2] == "1", "condition_holds is a 0/1 flag");
        let width: f64 = row[3].parse().expect("width cell");
        let m: u64 = row[4].parse().expect("m_noiseless cell");
        assert!(m as f64 >= width, "measurement count rounds the width up");
        let m_noisy: u64 = row[5].parse().expect("m_noisy cell");
        assert!(m_noisy >= m);
    }
}

#[test]
fn width_reports_estimate_and_std_error() {
    let dir = tempfile::tempdir().unwrap();
    let instance = small_instance(&dir);
    let csv = stdout_of(&[
        "width",
        "--instance",
        instance.to_str().unwrap(),
        "--which",
        "f1",
        "--beta",
        "1",
        "--trials",
        "3000",
        "--seed",
        "5",
    ]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("estimate,std_error"));
    let row: Vec<f64> =
        lines.next().unwrap().split(',').map(|t| t.parse().expect("numeric cell")).collect();
    let (estimate, std_error) = (row[0], row[1]);
    assert!(estimate > 0.0 && estimate < 24.0, "width of a cone in R^24 lies in (0, 24)");
    assert!(std_error > 0.0 && std_error < 1.0);

    // the default l1 cone is wider than the prior-aware one on this instance
    let l1 = stdout_of(&[
        "width",
        "--instance",
        instance.to_str().unwrap(),
        "--which",
        "l1",
        "--trials",
        "3000",
        "--seed",
        "5",
    ]);
    let l1_estimate: f64 = l1.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!(l1_estimate > estimate, "prior information should shrink the cone");
}

#[test]
fn solve_from_instance_recovers_and_prints_solution_json() {
    let dir = tempfile::tempdir().unwrap();
    let instance = small_instance(&dir);
    let json = stdout_of(&[
        "solve",
        "--instance",
        instance.to_str().unwrap(),
        "--m",
        "14",
        "--matrix-seed",
        "2",
        "--reg",
        "l1l1",
        "--beta",
        "1",
    ]);
    let solution: Value = serde_json::from_str(&json).expect("solution JSON");
    assert_eq!(solution["status"], "converged");
    assert_eq!(solution["x_hat"].as_array().unwrap().len(), 24);
    assert!(solution["kkt_residual"].as_f64().unwrap() <= 1e-6);
    assert!(solution["iterations"].as_u64().unwrap() >= 1);

    // the recovered vector matches the planted one
    let instance_json: Value =
        serde_json::from_str(&std::fs::read_to_string(&instance).unwrap()).unwrap();
    let err_sq: f64 = solution["x_hat"]
        .as_array()
        .unwrap()
        .iter()
        .zip(instance_json["x_star"].as_array().unwrap())
        .map(|(a, b)| (a.as_f64().unwrap() - b.as_f64().unwrap()).powi(2))
        .sum();
    assert!(err_sq.sqrt() < 1e-4, "recovery error {} too large", err_sq.sqrt());
}

#[test]
fn solve_accepts_a_problem_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("problem.json");
    let problem = serde_json::json!({
        "a": [[1.0, 0.0, 0.5], [0.0, 1.0, -0.25]],
        "y": [2.0, 0.0],
        "regularizer": { "type": "l1" },
        "constraint": { "type": "exact" }
    });
    std::fs::write(&path, serde_json::to_string(&problem).unwrap()).unwrap();
    let json = stdout_of(&["solve", "--problem", path.to_str().unwrap()]);
    let solution: Value = serde_json::from_str(&json).expect("solution JSON");
    assert_eq!(solution["status"], "converged");
    let x: Vec<f64> =
        solution["x_hat"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    // the sparsest point on this affine set is (2, 0, 0)
    assert!((x[0] - 2.0).abs() < 1e-5 && x[1].abs() < 1e-5 && x[2].abs() < 1e-5, "x = {x:?}");
}

#[test]
fn phase_hits_full_success_at_square_systems_and_is_reproducible() {
    let args = [
        "phase",
        "--n",
        "24",
        "--s",
        "4",
        "--z-sparsity",
        "3",
        "--overlap",
        "2",
        "--seed",
        "3",
        "--trials",
        "4",
        "--m-grid",
        "24",
        "--solvers",
        "l1,l1l1",
        "--beta",
        "1",
    ];
    let first = stdout_of(&args);
    let second = stdout_of(&args);
    assert_eq!(first, second, "fixed seeds must reproduce identical CSV bytes");

    let data_rows: Vec<&str> =
        first.lines().filter(|l| !l.starts_with('#') && !l.starts_with("solver,")).collect();
    assert_eq!(data_rows.len(), 2);
    for row in data_rows {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[2], "24");
        assert_eq!(cells[3], "1", "every solver succeeds when m = n: {row}");
    }
}

#[test]
fn betasweep_lists_min_measurements_per_beta() {
    let csv = stdout_of(&[
        "betasweep",
        "--n",
        "20",
        "--s",
        "3",
        "--z-sparsity",
        "2",
        "--overlap",
        "1",
        "--seed",
        "3",
        "--family",
        "l1l1",
        "--betas",
        "0.5,2",
        "--matrix-seeds",
        "1",
    ]);
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("solver,beta,seed,min_m,bound_m"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    for row in &rows {
        assert_eq!(row[0], "l1l1");
        let min_m: u64 = row[3].parse().expect("min_m cell");
        assert!((1..=20).contains(&min_m), "min_m within 1..=n: {row:?}");
    }
}

#[test]
fn conditions_covers_both_prior_families() {
    let dir = tempfile::tempdir().unwrap();
    let instance = small_instance(&dir);
    let l1l1 = stdout_of(&[
        "conditions",
        "--instance",
        instance.to_str().unwrap(),
        "--family",
        "l1l1",
        "--betas",
        "0.7:0.9:0.1",
    ]);
    let header = l1l1.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "beta,lhs,rhs_2a,rhs_2b,rhs_3a,rhs_3b,holds_2a,holds_2b,holds_3a,holds_3b");
    assert_eq!(l1l1.lines().filter(|l| !l.starts_with('#')).count(), 1 + 3);

    let l1l2 = stdout_of(&[
        "conditions",
        "--instance",
        instance.to_str().unwrap(),
        "--family",
        "l1l2",
        "--betas",
        "0.5,2",
    ]);
    let header = l1l2.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "beta,lhs,rhs_1,rhs_2,holds_1,holds_2");

    let bad = run(&["conditions", "--instance", instance.to_str().unwrap(), "--family", "l9"]);
    assert!(!bad.status.success(), "unknown family must be rejected");
}

#[test]
fn verify_passes_and_reports_each_suite() {
    let out = run(&["verify", "--trials", "150", "--seed", "11"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for suite in [
        "set-identities",
        "gaussian-norm-sandwich",
        "gaussian-tail-sandwich",
        "interval-bound-domination",
        "bound-anchors",
        "prox-spot-checks",
        "affine-projection",
    ] {
        assert!(text.contains(&format!("{suite}: ok")), "missing `{suite}: ok` in:\n{text}");
    }
}

#[test]
fn out_flag_writes_the_file_instead_of_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let instance = small_instance(&dir);
    let target = dir.path().join("bounds.csv");
    let printed = stdout_of(&[
        "bounds",
        "--instance",
        instance.to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert!(printed.is_empty(), "with --out nothing goes to stdout");
    let saved = std::fs::read_to_string(&target).unwrap();
    assert!(saved.starts_with("beta,case,condition_holds,width_sq,m_noiseless,m_noisy\n"));
}

#[test]
fn malformed_inputs_exit_nonzero_with_a_message() {
    let missing = run(&["bounds", "--instance", "/nonexistent/instance.json"]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("error:"));

    let dir = tempfile::tempdir().unwrap();
    let garbled = dir.path().join("bad.json");
    std::fs::write(&garbled, "{ not json").unwrap();
    let bad = run(&["solve", "--problem", garbled.to_str().unwrap()]);
    assert!(!bad.status.success());

    let infeasible = run(&["gen", "--n", "5", "--s", "9"]);
    assert!(!infeasible.status.success(), "s > n must be rejected");
}

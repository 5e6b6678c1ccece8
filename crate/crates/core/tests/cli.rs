use std::process::{Command, Output};

use serde_json::Value;

fn qplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qplab"))
        .args(args)
        .env("QPLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn vandermonde_prints_the_normalizer() {
    let out = qplab(&["vandermonde", "--lambdas", "0,1,2,3,4,5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["version"], "qplab-report/1");
    assert_eq!(
        r["metrics"]["normalizer"],
        serde_json::json!(["-1/120", "1/24", "-1/12", "1/12", "-1/24", "1/120"])
    );
}

#[test]
fn malformed_coefficients_exit_with_2() {
    let out = qplab(&["pencil", "info", "--lambdas", "abc,1,2,3,4,5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qplab(&["pencil", "info", "--lambdas", "0,0,1,2,3,4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qplab(&["pencil", "info", "--lambdas", "0,1,2,3,4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn near_duplicate_coefficients_are_accepted() {
    let out = qplab(&["pencil", "info", "--lambdas", "1,1000000000000001/1000000000000000,2,3,4,5"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn seeded_runs_are_reproducible() {
    let args = ["verify", "diagram", "--g", "2", "--seed", "9", "--holdout", "20"];
    let a = qplab(&args);
    let b = qplab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_qplab"))
        .args(args)
        .env("QPLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn impossible_tolerance_fails_with_1() {
    let out = qplab(&["verify", "diagram", "--g", "2", "--holdout", "10", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["pass"], false);
}

#[test]
fn point_files_roundtrip_through_the_cli() {
    let dir = std::env::temp_dir().join(format!("qplab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let sample = dir.join("sample.json");
    let out = qplab(&["sample", "--g", "2", "--seed", "4", "--json-out", sample.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&sample).unwrap()).unwrap();
    let point = dir.join("point.json");
    std::fs::write(&point, r["metrics"]["point"].to_string()).unwrap();

    let out = qplab(&["bundle", "splitting", "--point", point.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["metrics"]["degrees"], serde_json::json!([0, 0, 0, 1]));
    assert_eq!(r["metrics"]["trivial_matches_tangent"], true);

    let out = qplab(&["phi", "--point", point.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn skew_invariants_reads_a_matrix_file() {
    let path = std::env::temp_dir().join(format!("qplab-skew-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"matrix": [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 2], [0, 0, -2, 0]]}"#).unwrap();
    let out = qplab(&["skew", "invariants", "--matrix", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["metrics"]["pf"], "2");
    assert_eq!(r["metrics"]["a"], serde_json::json!(["5", "4"]));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn job_files_match_subcommands() {
    let path = std::env::temp_dir().join(format!("qplab-job-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"command": "verify-lagrangian", "g": 2, "seed": 3, "samples": 5}"#).unwrap();
    let a = qplab(&["--job", path.to_str().unwrap()]);
    let b = qplab(&["verify", "lagrangian", "--g", "2", "--seed", "3", "--samples", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    std::fs::write(&path, r#"{"command": "fly"}"#).unwrap();
    assert_eq!(qplab(&["--job", path.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_file(&path).unwrap();
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_urysohn-ifs"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn with_config(command: &str, config: &str, extra: &[&str], out: &Path) -> Output {
    let config = configs().join(config);
    let mut args = vec![command, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args, out)
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn triangle_violation_exits_one_with_its_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config("validate", "triangle_violation.json", &[], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("TriangleViolation(0,2,1)"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn sierpinski_attractor_writes_cloud_and_history() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config("attractor", "sierpinski.json", &[], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = stdout_json(&out);
    assert_eq!(report["converged"], true);
    assert!(report["steps"].as_u64().unwrap() <= 14);
    let csv = std::fs::read_to_string(dir.path().join("attractor.csv")).unwrap();
    assert!(csv.starts_with("x,y\n"));
    assert_eq!(
        csv.lines().count() as u64,
        report["points"].as_u64().unwrap() + 1
    );
    let history: Vec<f64> =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("history.json")).unwrap())
            .unwrap();
    assert!(*history.last().unwrap() <= 1e-3);
}

#[test]
fn iteration_cap_exits_two_and_keeps_history() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config(
        "attractor",
        "sierpinski.json",
        &["--max-iter", "3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("NonConvergence"));
    let history: Vec<f64> =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("history.json")).unwrap())
            .unwrap();
    assert_eq!(history, vec![0.5, 0.25, 0.125]);
}

#[test]
fn tolerance_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config(
        "attractor",
        "sierpinski.json",
        &["--tol", "1/64"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["steps"], 6);
}

#[test]
fn half_scaling_is_banach() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config("classify", "classify_half.json", &[], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["banach"], true);
    assert_eq!(report["rakotch"], true);
    assert_eq!(report["matkowski"], true);
    assert!(dir.path().join("classification.json").exists());
}

#[test]
fn transport_reports_exact_distance() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config("wasserstein", "transport.json", &[], dir.path());
    assert_eq!(out.status.code(), Some(0));
    // a,b at 1/2 each onto c at 1/4, d at 3/4 on the path a-b-c-d
    assert_eq!(stdout_json(&out)["distance"], "9/4");
}

#[test]
fn lift_check_meets_the_contraction_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config(
        "lift-check",
        "lift_half.json",
        &["--trials", "20"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = stdout_json(&out);
    assert_eq!(report["trials"], 20);
    assert_eq!(report["strict_fraction"], 1.0);
    assert_eq!(report["marginals_exact"], true);
}

#[test]
fn extension_has_no_excess() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config("extend", "extend_isometry.json", &[], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = stdout_json(&out);
    assert_eq!(report["max_excess"], "0");
    assert_eq!(report["map"].as_array().unwrap().len(), 8);
    let transcript: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("transcript.json")).unwrap())
            .unwrap();
    assert_eq!(transcript.as_array().unwrap().len(), 5);
}

#[test]
fn realize_fixes_the_embedded_fractal() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_config("realize", "realize.json", &[], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = stdout_json(&out);
    assert_eq!(report["fixed_set"], true);
    assert_eq!(report["grown_size"], 12);
    assert_eq!(report["final_distance"], "0");
}

#[test]
fn urysohn_growth_is_seeded() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = with_config("urysohn", "urysohn.json", &["--seed", "1"], a.path());
    let second = with_config("urysohn", "urysohn.json", &["--seed", "2"], b.path());
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(second.status.code(), Some(0));
    assert_ne!(
        std::fs::read(a.path().join("urysohn.json")).unwrap(),
        std::fs::read(b.path().join("urysohn.json")).unwrap()
    );
}

#[test]
fn malformed_input_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"space": {"kind": "table", "labels": ["a"], "dist": [["x"]]}}"#,
    )
    .unwrap();
    let out = run(&["validate", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    std::fs::write(&bad, r#"{"unknown": 1}"#).unwrap();
    let out = run(&["validate", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(run(&["validate"], dir.path()).status.code(), Some(3));
    assert_eq!(run(&["no-such-command"], dir.path()).status.code(), Some(3));
    assert_eq!(run(&["--help"], dir.path()).status.code(), Some(0));
}

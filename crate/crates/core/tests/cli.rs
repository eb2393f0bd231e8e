use std::fs;
use std::path::Path;

use hexweb::cli::run;
use serde_json::Value;

const SOLUTION_A: &str = r#"{
  "kind": "potential",
  "case": "A",
  "monomials": [ { "exps": [2, 2], "coef": "1/4" }, { "exps": [0, 5], "coef": "1/60" } ],
  "samples": 20
}"#;

const NOT_A_SOLUTION: &str = r#"{
  "kind": "potential",
  "case": "B",
  "monomials": [ { "exps": [3, 0], "coef": "1/6" }, { "exps": [0, 3], "coef": "1/3" } ],
  "samples": 10
}"#;

const CONTROL: &str = r#"{
  "kind": "field",
  "a": [ { "exps": [0, 0], "coef": 1 } ],
  "b": [],
  "c": [ { "exps": [1, 0], "coef": 1 }, { "exps": [0, 2], "coef": 1 } ],
  "r": [ { "exps": [0, 0], "coef": 1 } ],
  "window": [-3.5, -2.5, -0.5, 0.5],
  "samples": 10,
  "expect_flat": true
}"#;

fn hexweb(args: &[&str]) -> i32 {
    run(std::iter::once("hexweb").chain(args.iter().copied()))
}

fn with_config(dir: &Path, text: &str) -> String {
    let p = dir.join("job.json");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn report(dir: &Path, command: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{command}.json"))).unwrap()).unwrap()
}

#[test]
fn normalforms_runs_without_a_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(hexweb(&["normalforms", "--out", out]), 0);
    let r = report(dir.path(), "normalforms");
    assert_eq!(r["pass"], Value::Bool(true));
    assert!(r["invariants"].as_array().unwrap().len() > 20);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(hexweb(&["frobnicate"]), 2);
    assert_eq!(hexweb(&["check", "--out", out]), 2);
    assert_eq!(hexweb(&["check", "--config", "/nonexistent/job.json", "--out", out]), 2);
    let bad = with_config(dir.path(), r#"{ "kind": "potential", "case": "A", "monomials": [], "colour": 1 }"#);
    assert_eq!(hexweb(&["check", "--config", &bad, "--out", out]), 2);
    let dup = with_config(
        dir.path(),
        r#"{ "kind": "potential", "case": "A", "monomials": [ { "exps": [2, 2], "coef": 1 }, { "exps": [2, 2], "coef": 2 } ] }"#,
    );
    assert_eq!(hexweb(&["check", "--config", &dup, "--out", out]), 2);
}

#[test]
fn strict_rejects_a_non_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = with_config(dir.path(), NOT_A_SOLUTION);
    assert_eq!(hexweb(&["check", "--config", &cfg, "--out", out, "--strict"]), 3);
    // without --strict the associativity invariant fails instead
    assert_eq!(hexweb(&["check", "--config", &cfg, "--out", out]), 1);
    assert_eq!(report(dir.path(), "check")["pass"], Value::Bool(false));
}

#[test]
fn check_solution_a_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = with_config(dir.path(), SOLUTION_A);
    assert_eq!(hexweb(&["check", "--config", &cfg, "--out", out, "--seed", "3", "--strict"]), 0);
    let first = fs::read(dir.path().join("check.json")).unwrap();
    assert_eq!(hexweb(&["check", "--config", &cfg, "--out", out, "--seed", "3"]), 0);
    assert_eq!(first, fs::read(dir.path().join("check.json")).unwrap());
    let r = report(dir.path(), "check");
    assert_eq!(r["seed"], Value::from(3));
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
    let names: Vec<&str> = r["invariants"].as_array().unwrap().iter().map(|i| i["name"].as_str().unwrap()).collect();
    for n in ["associativity", "corollary", "gamma_routes", "flatness", "theorem2", "euler_symmetry"] {
        assert!(names.contains(&n), "{n} missing from {names:?}");
    }
}

#[test]
fn non_flat_field_fails_when_flatness_is_expected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = with_config(dir.path(), CONTROL);
    assert_eq!(hexweb(&["check", "--config", &cfg, "--out", out]), 1);
    let cfg = with_config(dir.path(), &CONTROL.replace("\"expect_flat\": true", "\"expect_flat\": false"));
    assert_eq!(hexweb(&["check", "--config", &cfg, "--out", out]), 0);
}

#[test]
fn artifacts_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = with_config(dir.path(), SOLUTION_A);
    for cmd in ["leaves", "discriminant", "gamma", "closure"] {
        assert_eq!(hexweb(&[cmd, "--config", &cfg, "--out", out]), 0, "{cmd}");
        let r = report(dir.path(), cmd);
        for a in r["artifacts"].as_array().unwrap() {
            assert!(dir.path().join(a.as_str().unwrap()).exists(), "{cmd}: {a}");
        }
    }
    let svg = fs::read_to_string(dir.path().join("leaves.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
}

#[test]
fn classify_reports_the_catalog_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = with_config(dir.path(), r#"{ "kind": "normal_form", "id": 4 }"#);
    assert_eq!(hexweb(&["classify", "--config", &cfg, "--out", out]), 0);
    let details = &report(dir.path(), "classify")["details"];
    assert_eq!(details["status"], Value::from("matched"));
    assert_eq!(details["matched"]["id"], Value::from(4));
    assert_eq!(details["weights"], serde_json::json!([1, 3]));
}

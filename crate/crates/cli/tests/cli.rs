use std::fs;
use std::path::Path;

use harmonic_cli::{run, run_with_registry, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
use harmonic_coding::faults::register_faults;
use harmonic_coding::SchemeRegistry;
use serde_json::Value;

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn exec_with(registry: &SchemeRegistry, args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("harmonic").chain(args.iter().copied());
    let code = run_with_registry(argv, registry, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn exec(args: &[&str]) -> Outcome {
    exec_with(&SchemeRegistry::default(), args)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn demo_succeeds_with_defaults() {
    let r = exec(&["demo"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("decode vector                2,1,3,1\n"));
    assert!(r.out.contains("100/100 exact"));
}

#[test]
fn demo_overrides() {
    let r = exec(&["demo", "--c", "3"]);
    assert_eq!(r.code, EXIT_FAILURE);
    assert!(r.err.contains("decode vector: expected 2,1,3,1"));
    assert_eq!(exec(&["demo", "--c", "1", "--betas", "2"]).code, EXIT_USAGE);
    assert_eq!(exec(&["demo", "--c", "4", "--betas", "4"]).code, EXIT_OK);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(exec(&[]).code, EXIT_USAGE);
    assert_eq!(exec(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(exec(&["validate", "--p", "12"]).code, EXIT_USAGE);
    assert_eq!(exec(&["validate", "--scheme", "nope"]).code, EXIT_USAGE);
    assert_eq!(exec(&["validate", "--trials", "0"]).code, EXIT_USAGE);
    assert_eq!(exec(&["validate", "--scheme", "lcc", "--p", "5", "--K", "2", "--d", "2"]).code, EXIT_USAGE);
    assert_eq!(exec(&["compare", "--K", "0", "--d", "2"]).code, EXIT_USAGE);
    assert_eq!(exec(&["--help"]).code, EXIT_OK);
}

#[test]
fn validate_streams_json_lines() {
    for scheme in ["harmonic", "shamir", "lcc"] {
        let r = exec(&["validate", "--scheme", scheme, "--p", "13", "--K", "3", "--d", "2", "--m", "2", "--n", "2", "--trials", "20", "--seed", "4"]);
        assert_eq!(r.code, EXIT_OK, "{scheme}: {}", r.err);
        let lines: Vec<Value> = r.out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 20);
        assert!(lines.iter().all(|l| l["exact_match"] == Value::Bool(true) && l["scheme"] == scheme));
    }
    let r = exec(&["validate", "--scheme", "freshman", "--p", "5", "--K", "3", "--trials", "10"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
}

#[test]
fn validate_is_reproducible() {
    let args = ["validate", "--p", "11", "--K", "2", "--d", "3", "--trials", "5", "--seed", "99"];
    assert_eq!(exec(&args).out, exec(&args).out);
}

#[test]
fn validate_with_fixed_task() {
    let dir = tempfile::tempdir().unwrap();
    let task = dir.path().join("task.json");
    fs::write(&task, r#"{"p":7,"m":2,"n":1,"g":[[{"coeff":3,"exps":[2,0]},{"coeff":1,"exps":[1,1]}]]}"#).unwrap();
    let r = exec(&["validate", "--p", "7", "--K", "3", "--d", "2", "--trials", "10", "--task", path(&task)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);

    fs::write(&task, r#"{"p":7,"m":1,"n":1,"g":[[{"coeff":3,"exps":[3]}]]}"#).unwrap();
    let r = exec(&["validate", "--p", "7", "--K", "2", "--d", "2", "--task", path(&task)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("degree"), "{}", r.err);
}

#[test]
fn privacy_audit_reports_json() {
    let r = exec(&["privacy-audit", "--p", "5", "--K", "2", "--d", "2"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["private"], Value::Bool(true));
    assert_eq!(v["workers"], 4);
}

#[test]
fn privacy_audit_flags_leaky_scheme() {
    let mut reg = SchemeRegistry::default();
    register_faults(&mut reg);
    let r = exec_with(&reg, &["privacy-audit", "--scheme", "leaky-clear", "--p", "5", "--K", "2", "--d", "2"]);
    assert_eq!(r.code, EXIT_FAILURE);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["private"], Value::Bool(false));
    let mi = v["mi_bits_per_worker"][3].as_f64().unwrap();
    assert!((mi - 5f64.log2()).abs() < 1e-9);
}

#[test]
fn privacy_audit_budget_is_enforced() {
    let r = exec(&["privacy-audit", "--scheme", "shamir", "--p", "13", "--K", "3", "--d", "3", "--m", "2"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("PRIVACY_AUDIT_BUDGET"));
}

#[test]
fn compare_outputs() {
    let r = exec(&["compare", "--K", "10", "--d", "2", "--json"]);
    assert_eq!(r.code, EXIT_OK);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    let counts: Vec<u64> = v.as_array().unwrap().iter().map(|row| row["workers"].as_u64().unwrap()).collect();
    assert_eq!(counts, vec![12, 21, 30, 2]);
    let text = exec(&["compare", "--K", "10", "--d", "2"]).out;
    assert!(text.contains("harmonic         12"));
}

#[test]
fn file_pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    fs::write(p("data.json"), r#"{"K":3,"data":[[1,2],[3,4],[5,6]]}"#).unwrap();
    fs::write(
        p("task.json"),
        r#"{"p":11,"m":2,"n":2,"g":[[{"coeff":2,"exps":[1,1]},{"coeff":1,"exps":[0,1]}],[{"coeff":1,"exps":[2,0]}]]}"#,
    )
    .unwrap();
    // f = sum 2 x y + y, sum x^2  ->  (2*(2+12+30) + 12, 1 + 9 + 25) mod 11 = (1, 2)
    for scheme in ["harmonic", "shamir", "lcc"] {
        let r = exec(&["encode", "--scheme", scheme, "--p", "11", "--d", "2", "--data", path(&p("data.json")), "--seed", "7", "--out", path(&p("shares.json"))]);
        assert_eq!(r.code, EXIT_OK, "{scheme}: {}", r.err);
        let r = exec(&["evaluate", "--task", path(&p("task.json")), "--shares", path(&p("shares.json")), "--out", path(&p("outputs.json"))]);
        assert_eq!(r.code, EXIT_OK, "{}", r.err);
        let r = exec(&["decode", "--shares", path(&p("shares.json")), "--outputs", path(&p("outputs.json"))]);
        assert_eq!(r.code, EXIT_OK, "{}", r.err);
        assert_eq!(r.out.trim(), r#"{"f":[1,2]}"#);
    }
}

#[test]
fn malformed_files_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.json");
    fs::write(&data, r#"{"K":2,"data":[[1],[11]]}"#).unwrap();
    let r = exec(&["encode", "--p", "11", "--data", path(&data)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("out of range"));

    fs::write(&data, r#"{"K":2,"data":[[1],[2]]}"#).unwrap();
    let shares = dir.path().join("shares.json");
    assert_eq!(exec(&["encode", "--p", "11", "--data", path(&data), "--out", path(&shares)]).code, EXIT_OK);
    let outputs = dir.path().join("outputs.json");
    fs::write(&outputs, r#"{"outputs":[[1],[2]]}"#).unwrap();
    let r = exec(&["decode", "--shares", path(&shares), "--outputs", path(&outputs)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("expected 4"), "{}", r.err);

    fs::write(&outputs, "not json").unwrap();
    assert_eq!(exec(&["decode", "--shares", path(&shares), "--outputs", path(&outputs)]).code, EXIT_USAGE);
    assert_eq!(exec(&["decode", "--shares", "/nonexistent", "--outputs", path(&outputs)]).code, EXIT_USAGE);
}

#[test]
fn run_uses_default_registry() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(["harmonic", "privacy-audit", "--scheme", "leaky-clear", "--p", "5"], &mut out, &mut err);
    assert_eq!(code, EXIT_USAGE);
}

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn charvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charvol"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("charvol-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Replaces every leaf with its JSON type and keeps only the first element
/// of arrays, so the result pins the layout and nothing else.
fn skeleton(v: &Value) -> Value {
    match v {
        Value::Null => Value::String("null".into()),
        Value::Bool(_) => Value::String("bool".into()),
        Value::Number(_) => Value::String("number".into()),
        Value::String(_) => Value::String("string".into()),
        Value::Array(items) => Value::Array(items.first().map(skeleton).into_iter().collect()),
        Value::Object(map) => Value::Object(map.iter().map(|(k, v)| (k.clone(), skeleton(v))).collect()),
    }
}

#[test]
fn witten_s11_full_pipeline_exits_zero() {
    let out = charvol(&["verify", "--scenario", "witten-s11-sl2", "--trials", "50", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS witten-s11-sl2"));
}

#[test]
fn report_schema_matches_golden() {
    let path = scratch("schema.json");
    let out = charvol(&[
        "verify", "--scenario", "volume-f2-sl2", "--trials", "2", "--seed", "1", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let golden: Value = serde_json::from_str(include_str!("golden/report_schema.json")).unwrap();
    assert_eq!(skeleton(&report), golden);
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let a = scratch("a.json");
    let b = scratch("b.json");
    for (path, threads) in [(&a, "1"), (&b, "4")] {
        let out = charvol(&[
            "verify", "--scenario", "bending", "--trials", "8", "--seed", "11", "--threads", threads, "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn failing_tolerance_exits_one() {
    // central differences carry truncation error far above 1e-14
    let out = charvol(&["verify", "--scenario", "derivative-oracle", "--trials", "3", "--tol", "1e-14"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("FAIL"));
    let out = charvol(&["verify", "--scenario", "nu-consistency", "--trials", "6", "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    let out = charvol(&["verify", "--scenario", "no-such-scenario"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("volume-f2-sl2"));
    assert_eq!(charvol(&["verify", "--scenario", "su-nu", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(charvol(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(charvol(&["sample", "--group", "gl2", "--rank", "2"]).status.code(), Some(2));
}

#[test]
fn list_names_every_acceptance_scenario() {
    let out = charvol(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in [
        "volume-f2-sl2",
        "volume-f3-sl2",
        "volume-f4-sl2",
        "volume-f2-sl3",
        "volume-f3-sl3",
        "nu-consistency",
        "witten-s11-sl2",
        "witten-s04-sl2",
        "goldman-identities",
        "bending",
        "trace-identities",
        "su-nu",
        "dimensions",
        "regularity-lemmas",
        "derivative-oracle",
        "vandermonde-newton",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn sample_then_eval_round_trip() {
    let rep = scratch("rep.json");
    let out = charvol(&["sample", "--group", "sl2", "--rank", "2", "--seed", "5", "--out", rep.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = charvol(&["eval", "--form", "f2_sl2", "--rep", rep.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let pre = v["prefactor"][0].as_f64().unwrap();
    assert!((pre - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    assert!(v["determinant"].is_array());
    let ratio = (v["ratio"][0].as_f64().unwrap(), v["ratio"][1].as_f64().unwrap());
    assert!(((ratio.0 * ratio.0 + ratio.1 * ratio.1).sqrt() - 1.0).abs() < 1e-7);

    let s04 = scratch("s04.json");
    let out = charvol(&["sample", "--group", "sl2", "--surface", "S04", "--seed", "5", "--out", s04.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = charvol(&["eval", "--form", "s04_sl2", "--rep", s04.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["omega"].is_array() && v["bracket"].is_array());

    let out = charvol(&["sample", "--group", "sl2", "--surface", "S04", "--rank", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lsdiv"))
        .args(args)
        .env_remove("LSDIV_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn normal_pair_closed_form() {
    let v = json(&["divergence", "--f", "kl", "--p", "normal(l=0,s=1)", "--q", "normal(l=1,s=1)"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["value"].as_f64().unwrap(), 0.5);
    assert_eq!(v["method"], "closed_form");
    assert_eq!(v["reduced"]["l"].as_f64().unwrap(), 1.0);
}

#[test]
fn normal_cauchy_by_quadrature_and_reverse_diverges() {
    let v = json(&["divergence", "--f", "kl", "--p", "normal", "--q", "cauchy"]);
    assert!((v["value"].as_f64().unwrap() - 0.26).abs() < 5e-3);
    assert_eq!(v["method"], "quadrature");
    let v = json(&["divergence", "--f", "kl", "--p", "cauchy", "--q", "normal"]);
    assert_eq!(v["value"], "inf");
    assert_eq!(v["diverged"], true);
}

#[test]
fn halfnormal_projection() {
    let v = json(&["project", "--side", "right", "--p", "halfnormal(s=1)", "--q-family", "exponential", "--f", "kl"]);
    let s2 = v["argmin"]["s"].as_f64().unwrap();
    assert!((1.0 / s2 - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-6);
    assert!((v["min_value"].as_f64().unwrap() - 0.048).abs() < 5e-4);
}

#[test]
fn fisher_cauchy_constants_and_distance() {
    let v = json(&["fisher", "--family", "cauchy", "--constants"]);
    assert!((v["constants"]["a2"].as_f64().unwrap() - 0.5).abs() < 1e-7);
    assert!((v["constants"]["b2"].as_f64().unwrap() - 0.5).abs() < 1e-7);
    assert!((v["constants"]["curvature"].as_f64().unwrap() + 2.0).abs() < 1e-6);
    let v = json(&["fisher", "--family", "normal", "--from", "l=0,s=1", "--to", "l=0,s=2"]);
    assert!((v["distance"].as_f64().unwrap() - 2f64.sqrt() * 2f64.ln()).abs() < 1e-9);
}

#[test]
fn group_commands() {
    let v = json(&["group", "compose", "--g1", "l=1,s=2", "--g2", "l=3,s=4"]);
    assert_eq!(v["result"]["l"].as_f64().unwrap(), 7.0);
    assert_eq!(v["result"]["s"].as_f64().unwrap(), 8.0);
    let v = json(&["group", "inverse", "--g", "l=2,s=4"]);
    assert_eq!(v["result"]["l"].as_f64().unwrap(), -0.5);
    let v = json(&["group", "matrix", "--g", "l=1,s=2"]);
    assert_eq!(v["matrix"][1][1].as_f64().unwrap(), 1.0);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["divergence", "--p", "normal", "--q", "normal(l=1,s=2)", "--method", "mc", "--m", "5000", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_from_environment() {
    let args = ["divergence", "--p", "normal", "--q", "cauchy", "--method", "mc", "--m", "2000"];
    let with_env = Command::new(env!("CARGO_BIN_EXE_lsdiv")).args(args).env("LSDIV_SEED", "11").output().unwrap();
    let explicit = run(&[&args[..], &["--seed", "11"]].concat());
    assert_eq!(with_env.stdout, explicit.stdout);
    let v: Value = serde_json::from_slice(&with_env.stdout).unwrap();
    assert_eq!(v["seed"], 11);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["divergence", "--p", "banana", "--q", "normal"]).status.code(), Some(2));
    assert_eq!(run(&["divergence", "--p", "normal(s=-1)", "--q", "normal"]).status.code(), Some(2));
    assert_eq!(run(&["divergence", "--p", "normal", "--q", "normal", "--m", "0", "--method", "mc"]).status.code(), Some(2));
    assert_eq!(
        run(&["divergence", "--f", "tv", "--p", "normal", "--q", "cauchy", "--method", "closed"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["fisher", "--family", "uniform"]).status.code(), Some(2));
}

#[test]
fn csv_and_table_formats() {
    let out = run(&["group", "compose", "--g1", "l=1,s=2", "--g2", "l=3,s=4", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "schema,command,result.l,result.s");
    assert_eq!(lines[1], "1,group.compose,7.0,8.0");
    let out = run(&["divergence", "--p", "cauchy", "--q", "normal", "--format", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("value") && l.ends_with("inf")));
}

#[test]
fn selftest_reports_every_row() {
    let v = json(&["selftest"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(v["total"].as_u64().unwrap() as usize, rows.len());
    assert!(rows.iter().all(|r| r["pass"].is_boolean()));
}

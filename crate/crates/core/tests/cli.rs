use std::process::{Command, Output};

use volterra::VMatrix;

fn volterra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_volterra")).args(args).env_remove("VOLTERRA_PRECISION").output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn output_is_byte_identical() {
    for args in [
        &["discretize", "--alpha", "0.3", "--grid-size", "128", "--k", "4"][..],
        &["zeros", "--kind", "p", "--q", "0.4", "--n", "12"][..],
        &["completeness", "--n", "6", "--m", "2", "--grid-size", "128"][..],
    ] {
        let a = volterra(args);
        let b = volterra(args);
        assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(volterra(&["residuals", "--alpha", "0.5", "--n", "3", "--tol", "1e-8"]).status.code(), Some(0));
    // an unreachable tolerance is a contract failure, not a usage error
    let r = volterra(&["residuals", "--alpha", "0.5", "--n", "3", "--tol", "1e-40"]);
    assert_eq!(r.status.code(), Some(1));
    assert!(!json(&r)["errors"].as_array().unwrap().is_empty());
    assert_eq!(volterra(&["spectrum", "--alpha", "1.0"]).status.code(), Some(2));
    assert_eq!(volterra(&["nonsense"]).status.code(), Some(2));
    assert_eq!(volterra(&["discretize", "--grid-size", "4097"]).status.code(), Some(2));
}

#[test]
fn module_errors_stay_in_json() {
    // g_7 at alpha = 0.25 exceeds the double-precision cancellation budget
    let out = volterra(&["eigenfun", "--family", "g", "--alpha", "0.25", "--n", "7"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert!(doc["errors"][0].as_str().unwrap().contains("precision"));
    let ext = volterra(&["eigenfun", "--family", "g", "--alpha", "0.25", "--n", "7", "--precision", "extended"]);
    assert_eq!(ext.status.code(), Some(0));
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_volterra"))
        .args(["spectrum", "--n", "2"])
        .env("VOLTERRA_PRECISION", "extended")
        .output()
        .unwrap();
    assert_eq!(json(&out)["params"]["precision"], "extended");
}

#[test]
fn spectrum_and_qcheck_examples() {
    let doc = json(&volterra(&["spectrum", "--alpha", "0.5", "--n", "5"]));
    assert_eq!(doc["results"], serde_json::json!([0.5, 0.25, 0.125, 0.0625, 0.03125]));
    for key in ["command", "params", "results", "tolerances", "warnings"] {
        assert!(doc.get(key).is_some(), "{key}");
    }
    let doc = json(&volterra(&["qcheck", "--q", "0.5", "--z", "1.0"]));
    let p = doc["results"]["product"].as_f64().unwrap();
    let s = doc["results"]["series"].as_f64().unwrap();
    assert!((p - s).abs() < 1e-12);
}

#[test]
fn csv_tables() {
    let out = volterra(&["spectrum", "--alpha", "0.5", "--n", "3", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "n,eigenvalue\n1.0,0.5\n2.0,0.25\n3.0,0.125\n");
    let out = volterra(&["zeros", "--alpha", "0.5", "--n", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let second: f64 = text.lines().nth(2).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((second - (-1.0f64).exp()).abs() < 1e-10);
}

#[test]
fn matrix_export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.bin");
    let report = dir.path().join("report.json");
    let out = volterra(&[
        "discretize",
        "--grid-size",
        "64",
        "--matrix-out",
        path.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(bytes.len(), 8 + 8 * 64 * 65);
    let m = VMatrix::read_binary(bytes.as_slice()).unwrap();
    assert_eq!(m.size(), 64);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let rho = doc["results"]["spectral_radius"].as_f64().unwrap();
    assert!((rho - 0.5).abs() < 1e-2);
}

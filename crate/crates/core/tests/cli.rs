use std::path::{Path, PathBuf};
use std::process::Command;

use agler::agler::SosCertificate;
use agler::kummert::KummertCertificate;
use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_agler"))
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path
}

/// Runs the binary, returning the exit code and stdout parsed as JSON.
#[track_caller]
fn run(args: &[&dyn AsRef<std::ffi::OsStr>]) -> (i32, Value) {
    let out = bin().args(args.iter().map(|a| a.as_ref())).output().unwrap();
    let code = out.status.code().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {text}"));
    (code, value)
}

fn one_minus_z() -> Value {
    json!({"coeffs": [[1, 0], [-1, 0]]})
}

fn sym(weights: &[f64]) -> Value {
    json!({"d": weights.len() - 1, "weights": weights.iter().map(|w| [*w, 0.0]).collect::<Vec<_>>()})
}

fn three_var() -> Value {
    let t = -1.0 / 3.0;
    json!({"coeffs": [[1, 0], [t, 0], [t, 0], [0, 0], [t, 0], [0, 0], [0, 0], [0, 0]]})
}

fn certificate_round_trips<T: serde::de::DeserializeOwned + serde::Serialize + PartialEq + std::fmt::Debug>(
    path: &Path,
) {
    let text = std::fs::read_to_string(path).unwrap();
    let value: T = serde_json::from_str(&text).unwrap();
    let again: T = serde_json::from_str(&serde_json::to_string(&value).unwrap()).unwrap();
    assert_eq!(value, again);
}

#[test]
fn symmetrize_example() {
    let dir = TempDir::new().unwrap();
    let q = write(&dir, "q.json", &one_minus_z());
    let (code, out) = run(&[&"symmetrize", &q, &"-d", &"4"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        json!({"d": 4, "weights": [[1.0, 0.0], [-1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]})
    );
}

#[test]
fn symmetrize_errors() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "e.json", &json!({"coeffs": []}));
    let (code, out) = run(&[&"symmetrize", &empty, &"-d", &"3"]);
    assert_eq!(code, 2);
    assert!(out["error"]["message"]
        .as_str()
        .unwrap()
        .contains("at least one coefficient"));

    let q = write(&dir, "q.json", &json!({"coeffs": [[1, 0], [0, 0], [1, 0]]}));
    let (code, out) = run(&[&"symmetrize", &q, &"-d", &"1"]);
    assert_eq!(code, 2);
    assert_eq!(out["error"]["kind"], "DegreeExceeds");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"coeffs\": [[1, 0],\n [2, }").unwrap();
    let (code, out) = run(&[&"symmetrize", &bad, &"-d", &"3"]);
    assert_eq!(code, 2);
    let message = out["error"]["message"].as_str().unwrap();
    assert!(message.contains("line 2"), "{message}");
}

#[test]
fn check_boundary_example_and_certificate() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p4.json", &sym(&[1.0, -1.0, 0.0, 0.0, 0.0]));
    let cert = dir.path().join("c4.json");
    let (code, out) = run(&[&"check", &p, &"--certificate", &cert, &"--seed", &"42"]);
    assert_eq!(code, 0);
    assert!(matches!(
        out["status"].as_str().unwrap(),
        "Boundary" | "AglerDenominator"
    ));
    assert!(out["min_eigenvalue"].as_f64().unwrap().abs() < 1e-9);
    assert!(out["residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(out["config"]["seed"], 42);
    certificate_round_trips::<SosCertificate>(&cert);

    let (code, out) = run(&[&"verify", &p, &cert]);
    assert_eq!(code, 0);
    assert_eq!(out["kind"], "agler");
    assert_eq!(out["pass"], true);
}

#[test]
fn check_constant_and_unstable() {
    let dir = TempDir::new().unwrap();
    let one = write(&dir, "one.json", &sym(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
    let (code, out) = run(&[&"check", &one]);
    assert_eq!(code, 0);
    assert_eq!(out["status"], "AglerDenominator");

    let bad = write(&dir, "bad.json", &sym(&[1.0, 3.0, 0.0]));
    let (code, out) = run(&[&"check", &bad]);
    assert_eq!(code, 2);
    assert_eq!(out["error"]["kind"], "Unstable");
    assert!(out["error"]["margin"].as_f64().unwrap() < 0.0);
}

#[test]
fn certificate_command() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &sym(&[1.0, -0.5, 0.1]));
    let out_path = dir.path().join("cert.json");
    let code = bin()
        .args([
            "certificate".as_ref(),
            p.as_os_str(),
            "--out".as_ref(),
            out_path.as_os_str(),
        ])
        .status()
        .unwrap()
        .code()
        .unwrap();
    assert_eq!(code, 0);
    certificate_round_trips::<SosCertificate>(&out_path);
    let (code, _) = run(&[&"verify", &p, &out_path]);
    assert_eq!(code, 0);
}

#[test]
fn degree4_example() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &sym(&[1.0, -1.0, 0.0, 0.0, 0.0]));
    let (code, out) = run(&[&"degree4", &p]);
    assert_eq!(code, 0);
    assert_eq!(
        (out["lhs"].as_f64(), out["rhs"].as_f64(), &out["pass"]),
        (Some(7.0), Some(4.0), &json!(true))
    );

    let p5 = write(&dir, "p5.json", &sym(&[1.0, -1.0, 0.0, 0.0, 0.0, 0.0]));
    let (code, out) = run(&[&"degree4", &p5]);
    assert_eq!(code, 2);
    assert_eq!(out["error"]["kind"], "DimensionMismatch");
}

#[test]
fn kummert_example() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &three_var());
    let cert = dir.path().join("k.json");
    let (code, out) = run(&[&"kummert", &p, &"--certificate", &cert]);
    assert_eq!(code, 0);
    assert!(out["residual"].as_f64().unwrap() <= 1e-6);
    certificate_round_trips::<KummertCertificate>(&cert);

    let (code, out) = run(&[&"verify", &p, &cert]);
    assert_eq!(code, 0);
    assert_eq!(out["kind"], "kummert");

    // A zeroed Gram matrix fails verification.
    let mut raw: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    raw["G1"] = json!(vec![vec![[0.0, 0.0]; 4]; 4]);
    raw["H1"] = json!([]);
    let bad = write(&dir, "bad.json", &raw);
    let (code, out) = run(&[&"verify", &p, &bad]);
    assert_eq!(code, 1);
    assert!(out["residual"].as_f64().unwrap() > 1e-2);
}

#[test]
fn radius_of_constant() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "one.json", &sym(&[1.0, 0.0, 0.0, 0.0]));
    let (code, out) = run(&[&"radius", &p, &"--r-hi", &"1"]);
    assert_eq!(code, 0);
    assert_eq!(out["radius"].as_f64(), Some(1.0));
    let scan = out["scan"].as_array().unwrap();
    assert!(scan.iter().all(|s| s["status"] != "NotCertified"));
}

#[test]
fn reference_table_small_and_capped() {
    let (code, out) = run(&[&"paper-examples", &"--dmax", &"4"]);
    assert_eq!(code, 0);
    let rows = out["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["status"] != "NotCertified"));

    let (code, out) = run(&[&"paper-examples", &"--dmax", &"12"]);
    assert_eq!(code, 2);
    assert_eq!(out["error"]["kind"], "DegreeCap");
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", &three_var());
    let out = dir.path().join("out.json");
    let mut text = Vec::new();
    for _ in 0..2 {
        let status = bin()
            .args([
                "kummert".as_ref(),
                p.as_os_str(),
                "--seed".as_ref(),
                "7".as_ref(),
                "--out".as_ref(),
            ])
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        text.push(std::fs::read_to_string(&out).unwrap());
    }
    assert_eq!(text[0], text[1]);
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

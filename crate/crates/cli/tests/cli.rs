use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hopfsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hopfsub"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn verify_into(dir: &Path) -> Output {
    hopfsub(&[
        "verify",
        "--fibration",
        "pi1",
        "--fibration",
        "pi_C[2,1]",
        "--samples",
        "10",
        "--seed",
        "7",
        "--out",
        dir.to_str().unwrap(),
    ])
}

#[test]
fn reports_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(verify_into(a.path()).status.success());
    assert!(verify_into(b.path()).status.success());
    for name in ["pi1.json", "pi_C_2_1.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
        let v: serde_json::Value = serde_json::from_slice(&x).unwrap();
        assert_eq!(v["seed"], 7);
        assert!(v["checks"].as_array().is_some_and(|c| !c.is_empty()));
    }
}

#[test]
fn markdown_goes_to_stdout() {
    let out = hopfsub(&["verify", "--fibration", "pi4", "--samples", "3", "--format", "markdown"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("pi4"));
    assert!(text.contains('|'));
}

#[test]
fn unknown_fibration_fails() {
    let out = hopfsub(&["verify", "--fibration", "pi42", "--samples", "3"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("pi42"));
}

#[test]
fn tolerance_overrides_are_validated() {
    let out = hopfsub(&["verify", "--fibration", "pi1", "--samples", "3", "--tol", "nonsense=1"]);
    assert!(!out.status.success());
    let out = hopfsub(&["verify", "--fibration", "pi1", "--samples", "3", "--tol", "membership.total=-1"]);
    assert!(!out.status.success());
    // a lower bound nothing can reach fails the run without an error
    let out = hopfsub(&["verify", "--fibration", "pi1", "--samples", "3", "--tol", "a.injective=1e9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL a.injective"));
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("occupied");
    fs::write(&file, "x").unwrap();
    let out = hopfsub(&["verify", "--fibration", "pi1", "--samples", "3", "--out", file.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot create"));
}

#[test]
fn catalog_and_pi9_commands() {
    let out = hopfsub(&["catalog", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.as_array().is_some_and(|a| a.iter().any(|e| e["id"] == "pi_Oprime")));
    let out = hopfsub(&["check-pi9", "--samples", "1000", "--seed", "1"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("pass"));
}

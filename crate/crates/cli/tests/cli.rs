//! End-to-end checks of the command line: exit codes, fixture round trips,
//! and the documented outputs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn borkh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_borkh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("borkh-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn fixtures_verify_pair_homology() {
    let dir = tempdir("flow");
    let d = dir.to_str().unwrap();
    for name in ["hopf_left", "hopf_right"] {
        let out = borkh(&["fixtures", name, "--dir", d]);
        assert!(out.status.success(), "{:?}", out);
    }
    let left = format!("{d}/hopf_left.json");
    let right = format!("{d}/hopf_right.json");

    let out = borkh(&["verify", "--type", "d", &right]);
    assert_eq!(out.status.code(), Some(0));

    let out = borkh(&["verify", "--type", "a", &left]);
    assert_eq!(out.status.code(), Some(0));

    let out = borkh(&["pair", &left, &right, "--compare-oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("isomorphic: true"));

    let out = borkh(&["--json", "homology", "--pair", &left, &right]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["1/2"], 2);

    // randomized mode with a seed is deterministic
    let a = borkh(&["--json", "--mode", "randomized", "--seed", "9", "homology", "--pair", &left, &right]);
    let b = borkh(&["--json", "--mode", "randomized", "--seed", "9", "homology", "--pair", &left, &right]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["1/2"], 2);
}

#[test]
fn error_exit_codes() {
    let out = borkh(&["verify", "--type", "d", "/nonexistent/nothing.json"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempdir("codes");
    let d = dir.to_str().unwrap();
    borkh(&["fixtures", "example2_right", "--dir", d]);
    let file = format!("{d}/example2_right.json");
    let out = borkh(&["--max-states", "10", "build-d", &file]);
    assert_eq!(out.status.code(), Some(3));

    let out = borkh(&["fixtures", "no_such_fixture"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn build_dumps_round_trip() {
    let dir = tempdir("dump");
    let d = dir.to_str().unwrap();
    borkh(&["fixtures", "hopf_right", "--dir", d]);
    let right = format!("{d}/hopf_right.json");
    let out = borkh(&["--json", "build-d", &right]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["states"].as_array().unwrap().len(), 6);

    let out = borkh(&["reduce", &right]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("closed form agreement: pass"));

    let out = borkh(&["weightmove", &right, "--crossing", "c1"]);
    assert!(out.status.success());
}

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn lrcw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrcw")).args(args).env_remove("LRCW_WORKERS").output().expect("spawn lrcw")
}

fn lrcw_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lrcw"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn lrcw");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn singleton_bound_of_first_example() {
    let out = lrcw(&["bounds", "singleton", "--n", "24", "--k", "14", "--r", "2", "--delta", "2"]);
    assert!(out.status.success());
    assert_eq!(json(&out), Value::from(5));
}

#[test]
fn fano_plane_pipes_into_verify() {
    let gen = lrcw(&["designs", "gen", "--family", "pg", "--q1", "2", "--beta", "2"]);
    assert!(gen.status.success());
    let out = lrcw_stdin(&["designs", "verify"], &gen.stdout);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["report"]["is_steiner"], Value::Bool(true));
    assert_eq!(v["johnson_bound"], Value::from(7));
}

#[test]
fn broken_design_fails_verification() {
    let out = lrcw_stdin(&["designs", "verify"], b"7 2 3\n0 1 2\n0 1 3\n");
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["report"]["is_packing"], Value::Bool(false));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lrcw(&["bounds", "singleton", "--n", "24"]).status.code(), Some(2));
    assert_eq!(lrcw(&["lrc", "verify", "--layout", "/nonexistent/layout.json"]).status.code(), Some(2));
    let bad = lrcw(&["lrc", "construct", "--q", "7", "--r", "2", "--delta", "2", "--v", "2", "--h", "3", "--family", "pg", "--q1", "2", "--beta", "2"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn construct_verify_and_decode() {
    let dir = tempfile::tempdir().unwrap();
    let layout = dir.path().join("layout.json");
    let h = dir.path().join("h.txt");
    let l = layout.to_str().unwrap();
    let out = lrcw(&[
        "lrc", "construct", "--q", "11", "--r", "2", "--delta", "2", "--v", "2", "--h", "3", "--family", "pg", "--q1", "2",
        "--beta", "2", "--out", l, "--parity-check", h.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(json(&out)["n"], Value::from(24));

    let out = lrcw(&["lrc", "verify", "--layout", l, "--distance"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["distance"], serde_json::json!({"kind": "exact", "value": 5}));
    assert_eq!(v["optimal"], Value::Bool(true));

    let out = lrcw(&["erasure", "distance", "--matrix", h.to_str().unwrap()]);
    assert_eq!(json(&out), serde_json::json!({"kind": "exact", "value": 5}));

    let info: Vec<String> = (1..=14).map(|i| (i % 11).to_string()).collect();
    let out = lrcw(&["lrc", "encode", "--layout", l, "--info", &info.join(",")]);
    let word: Vec<u32> = serde_json::from_slice(&out.stdout).unwrap();
    let mut received: Vec<Option<u32>> = word.iter().copied().map(Some).collect();
    for c in [0, 1, 2, 21] {
        received[c] = None;
    }
    let rx = dir.path().join("rx.json");
    std::fs::write(&rx, serde_json::to_string(&received).unwrap()).unwrap();
    for extra in [&[][..], &["--structured"][..]] {
        let mut args = vec!["erasure", "decode", "--layout", l, "--received", rx.to_str().unwrap()];
        args.extend_from_slice(extra);
        let out = lrcw(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let decoded: Vec<u32> = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(decoded, word);
    }

    let out = lrcw(&["erasure", "check", "--layout", l, "--coords", "0,1,2,21"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["recoverable"], Value::Bool(true));
}

#[test]
fn gsd_build_and_claims_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let arr = dir.path().join("array.json");
    let out = lrcw(&[
        "gsd", "build", "--q", "11", "--r", "2", "--delta", "2", "--v", "2", "--h", "3", "--family", "pg", "--q1", "2",
        "--beta", "2", "--out", arr.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!((json(&out)["rows"].clone(), json(&out)["cols"].clone()), (Value::from(3), Value::from(8)));
    let out = lrcw(&["gsd", "check", "--array", arr.to_str().unwrap(), "--claims", "--distance", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let reports = json(&out);
    assert!(reports.as_array().unwrap().iter().all(|r| r["failed"] == 0));
    // Three columns can exceed what the code tolerates.
    let out = lrcw(&["gsd", "check", "--array", arr.to_str().unwrap(), "--y", "3", "--scope", "all"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sampled_reports_are_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let arr = dir.path().join("array.json");
    let a = arr.to_str().unwrap();
    lrcw(&[
        "gsd", "build", "--q", "11", "--r", "2", "--delta", "2", "--v", "1", "--h", "1", "--family", "pg", "--q1", "2",
        "--beta", "2", "--construction", "truncated", "--out", a,
    ]);
    let args = ["gsd", "check", "--array", a, "--y", "1", "--gamma", "1", "--samples", "200", "--seed", "11"];
    let one = lrcw(&args);
    let again = lrcw(&args);
    let mut four_args = args.to_vec();
    four_args.extend(["--workers", "4"]);
    let four = lrcw(&four_args);
    // One column plus a cell exceeds this array's distance, so some patterns fail.
    assert_eq!(one.status.code(), Some(1));
    assert!(json(&one)[0]["witnesses"].as_array().is_some_and(|w| !w.is_empty()));
    assert_eq!(one.stdout, again.stdout);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn gsd_params_of_plane_family() {
    let out = lrcw(&["gsd", "params", "--family", "pg", "--q1", "8", "--beta", "2", "--delta", "3", "--v", "1"]);
    let v = json(&out);
    assert_eq!((v["n"].clone(), v["k"].clone(), v["d"].clone()), (Value::from(657), Value::from(505), Value::from(9)));
}

#[test]
fn goppa_commands() {
    let base = ["--q", "16", "--r", "2", "--delta", "2", "--g1", "1,1", "--g2", "6,1,1", "--sets", "4,5,6;7,8,9"];
    let mut build = vec!["goppa", "build"];
    build.extend(base);
    let out = lrcw(&build);
    assert!(out.status.success());
    assert_eq!(json(&out)["k"], Value::from(2));
    let mut check = vec!["goppa", "check"];
    check.extend(base);
    let out = lrcw(&check);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // With a tail the measured distance falls short of h + delta.
    check.extend(["--tail", "10,11"]);
    let out = lrcw(&check);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["distance"]["value"], Value::from(3));
}

#[test]
fn length_bound_and_classify() {
    let out = lrcw(&["bounds", "length", "--q", "11", "--r", "2", "--delta", "2", "--h", "3"]);
    assert_eq!(json(&out)["floor"], Value::from(198));
    let out = lrcw(&["bounds", "classify", "--n", "24", "--k", "14", "--r", "2", "--delta", "2", "--d", "5", "--q", "11"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["optimal"], Value::Bool(true));
}

#[test]
fn fixtures_run_small_examples() {
    for name in ["example1", "example2"] {
        let out = lrcw(&["fixtures", "run", name]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)[0]["pass"], Value::Bool(true));
    }
}

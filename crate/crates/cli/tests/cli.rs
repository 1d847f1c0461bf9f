use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn resip(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_resip"));
    cmd.args(args).env_remove("RESIP_CAPS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn resip")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_str().unwrap().to_string()
}

fn scratch(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn witness_report_reverifies_and_tampering_is_caught() {
    let out = resip(&["--tasks", &fixture("09_witness.json")], &[]);
    assert_eq!(out.status.code(), Some(0));
    let report = scratch("witness_report.json");
    std::fs::write(&report, &out.stdout).unwrap();
    let ok = resip(&["verify-witness", "--certificate", report.to_str().unwrap()], &[]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let checks: Vec<Value> = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(checks.len(), 2);

    let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let survivors = &mut v["entries"][0]["certificate"]["quotient"]["survivors"];
    survivors[0]["image"]["X2"] = Value::String("0".into());
    let tampered = scratch("witness_tampered.json");
    std::fs::write(&tampered, serde_json::to_vec(&v).unwrap()).unwrap();
    let bad = resip(&["verify-witness", "--certificate", tampered.to_str().unwrap()], &[]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn caps_from_environment_and_flags() {
    let args = ["sl2-power", "--matrix", "2 1; 1 1", "--p", "7"];
    assert_eq!(resip(&args, &[]).status.code(), Some(0));
    assert_eq!(resip(&args, &[("RESIP_CAPS", "power_search=1")]).status.code(), Some(3));
    // the command line wins over the environment
    let mut with_flag = vec!["--caps", "power_search=1000"];
    with_flag.extend(args);
    assert_eq!(resip(&with_flag, &[("RESIP_CAPS", "power_search=1")]).status.code(), Some(0));
    assert_eq!(resip(&args, &[("RESIP_CAPS", "bogus=3")]).status.code(), Some(2));
}

#[test]
fn schema_subcommand_prints_json() {
    let out = resip(&["schema"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let schema: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(schema["$id"], "resip-tasks-v1");
}

#[test]
fn unknown_kind_and_missing_input() {
    let path = scratch("unknown_kind.json");
    std::fs::write(&path, r#"{"version": 1, "tasks": [{"kind": "knot"}]}"#).unwrap();
    let out = resip(&["--tasks", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tasks[0].kind"));
    assert_eq!(resip(&[], &[]).status.code(), Some(2));
    assert_eq!(resip(&["--tasks", "/nonexistent/tasks.json"], &[]).status.code(), Some(2));
}

#[test]
fn timing_is_opt_in_and_text_format_works() {
    let f = fixture("02_prime_set.json");
    let plain: Value = serde_json::from_slice(&resip(&["--tasks", &f], &[]).stdout).unwrap();
    assert!(plain["entries"][0].get("elapsed_ms").is_none());
    let timed: Value = serde_json::from_slice(&resip(&["--tasks", &f, "--timing"], &[]).stdout).unwrap();
    assert!(timed["entries"][0]["elapsed_ms"].is_u64());
    let text = resip(&["--tasks", &f, "--format", "text"], &[]);
    assert_eq!(String::from_utf8_lossy(&text.stdout).trim(), "sol-cubed [primes] ok: residually p for {2}");
}

#[test]
fn task_errors_do_not_abort_the_batch() {
    let path = scratch("mixed.json");
    std::fs::write(
        &path,
        r#"{"version": 1, "tasks": [
            {"id": "singular", "kind": "torus", "matrix": [[2, 0], [0, 2]]},
            {"id": "fine", "kind": "bs", "q": 3}
        ]}"#,
    )
    .unwrap();
    let out = resip(&["--tasks", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["entries"][0]["status"], "error");
    assert_eq!(v["entries"][1]["status"], "ok");
}

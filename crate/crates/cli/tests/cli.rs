use std::path::Path;
use std::process::{Command, Output};

fn vdw(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdw")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn witness() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/w3_10_n96.vdwf").display().to_string()
}

#[test]
fn reference_lookup() {
    let dir = tempfile::tempdir().unwrap();
    let o = vdw(&["reference", "--k", "10"], dir.path());
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!((v["k"].as_u64(), v["w"].as_u64(), v["kind"].as_str()), (Some(10), Some(97), Some("exact")));
    let o = vdw(&["reference", "--k", "12"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = vdw(&["reference"], dir.path());
    assert_eq!(stdout_json(&o).as_array().unwrap().len(), 3);
}

#[test]
fn generate_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let o = vdw(&["generate", "--construction", "folklore", "--N", "500", "--output", "out"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = stdout_json(&o);
    assert_eq!(summary["summary"]["blue_3ap_free"], "true");
    assert_eq!(summary["summary"]["longest_red"], "167");
    for f in ["records.jsonl", "summary.csv", "replay.toml", "colouring.vdwf"] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
    let o = vdw(&["verify", "--colouring", "out/colouring.vdwf", "--d-max", "10"], dir.path());
    let v = stdout_json(&o);
    assert_eq!(v["blue_3ap_free"], true);
    assert_eq!(v["summary"]["longest_red"]["length"], 167);
    assert_eq!(v["summary"]["longest_red"]["witness"]["difference"], 3);
}

#[test]
fn replay_reproduces_records() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["quadgap", "--s", "2", "--Q", "10", "--B", "0.5", "--L", "20", "--diag-min", "1", "--trials", "8", "--toy", "--seed", "3"];
    let mut first = args.to_vec();
    first.extend(["--output", "a"]);
    assert!(vdw(&first, dir.path()).status.success());
    let o = vdw(&["quadgap", "--config", "a/replay.toml", "--output", "b"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = std::fs::read(dir.path().join("a/records.jsonl")).unwrap();
    let b = std::fs::read(dir.path().join("b/records.jsonl")).unwrap();
    assert_eq!(a, b);
    let o = vdw(&["bohr", "--config", "a/replay.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validation_and_budget_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = vdw(&["generate", "--construction", "green", "--N", "1000", "--D", "2", "--rho", "0.01"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rho"));
    let o = vdw(&["generate", "--construction", "green", "--D", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("N: required"));
    let o = vdw(&["dettail", "--size", "3", "--trials", "20000000"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = vdw(
        &["compare-st", "--s", "2", "--L", "30", "--Q", "3", "--diag-min", "1", "--toy", "--trials", "100000", "--xi-count", "100"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn witness_verification() {
    let dir = tempfile::tempdir().unwrap();
    let w = witness();
    let o = vdw(&["verify-witness", "--colouring", &w, "--k", "10"], dir.path());
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["confirmed"], true);
    assert_eq!(v["N"], 96);
    let o = vdw(&["verify-witness", "--colouring", &w, "--k", "9"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout_json(&o)["confirmed"], false);
}

#[test]
fn cliquepack_and_search_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let o = vdw(&["cliquepack", "--s", "64", "--m", "2", "--output", "c"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["summary"]["passes"], "true");
    let o = vdw(
        &["search", "--construction", "green-wolf", "--N", "2000", "--dims", "2,3", "--radius", "0.2", "--budget", "4", "--output", "s"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("s/colouring.vdwf").exists());
    let o = vdw(&["search", "--construction", "green-wolf", "--N", "2000"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

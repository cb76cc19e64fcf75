use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cgmt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cgmt")).args(args).output().expect("binary runs")
}

fn cgmt_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cgmt")).args(args).env(key, val).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cgmt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(path: &Path, text: &str) -> String {
    std::fs::write(path, text).unwrap();
    path.display().to_string()
}

fn ring(v: &Value) -> (u64, Vec<String>) {
    let q = v["q"].as_u64().unwrap();
    let coeffs = v["coeffs"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect();
    (q, coeffs)
}

#[test]
fn measure_full_tree_settles_at_two_u() {
    let r = json(&cgmt(&["measure", "--tree", "full", "--s", "1/2", "--n", "1", "--depth", "8"]));
    let seq = r["results"]["sequence"].as_array().unwrap();
    assert_eq!(seq.len(), 9);
    for row in seq {
        assert_eq!(ring(&row["value"]), (2, vec!["0/2^0".to_string(), "2/2^0".to_string()]));
        assert!(row["value"]["decimal"].as_str().unwrap().starts_with("1.41421356237309504880"));
    }
}

#[test]
fn measure_csv_has_one_row_per_block() {
    let out = cgmt(&["measure", "--tree", "dyadic:3/4", "--s", "1", "--depth", "5", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "block,value,decimal");
    assert_eq!(lines.len(), 7);
    assert!(lines[6].starts_with("5,1:3/2^2,0.75"));
}

#[test]
fn csv_is_rejected_for_certificates() {
    let out = cgmt(&["besicovitch", "--stages", "1", "--depth", "8", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        vec!["measure", "--tree", "dyadic:5/8", "--s", "2/3", "--n", "2", "--depth", "10"],
        vec!["besicovitch", "--s", "1/2", "--c", "1", "--stages", "4", "--depth", "32"],
        vec!["baire", "--tree", "dyadic:3/4", "--seed", "11"],
        vec!["gadget", "--seed", "4", "--horizon", "10"],
        vec!["verify-suite", "--trials", "40", "--seed", "9"],
    ] {
        let a = cgmt(&args);
        let b = cgmt(&args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn besicovitch_certificates_round_trip() {
    let out = cgmt(&["besicovitch", "--tree", "full", "--s", "1/2", "--c", "1", "--stages", "6"]);
    let report = json(&out);
    let certs = report["results"]["extraction"]["certificates"].as_array().unwrap().clone();
    assert_eq!(certs.len(), 6);
    assert!(report["results"]["verified"].as_array().unwrap().iter().all(|v| v == true));
    let path = scratch("besicovitch.json");
    let path = write(&path, std::str::from_utf8(&out.stdout).unwrap());

    let recheck = json(&cgmt(&["cover-verify", "--certificate", &path]));
    assert_eq!(recheck["results"]["all_verified"], true);
    for row in recheck["results"]["certificates"].as_array().unwrap() {
        assert_eq!(row["verdict"], true);
    }

    for cert in &certs {
        let stage = cert["stage"].as_u64().unwrap().to_string();
        let block = cert["upper_witness"]["block"].as_u64().unwrap();
        let m = json(&cgmt(&["measure", "--code", &path, "--s", "1/2", "--n", &stage, "--tree", "full"]));
        let row = &m["results"]["sequence"][block as usize];
        assert_eq!(row["block"].as_u64(), Some(block));
        assert_eq!(row["value"], cert["upper_witness"]["value"]);
    }
    let lower = json(&cgmt(&["measure", "--code", &path, "--s", "1/2", "--n", "0"]));
    let top = &lower["results"]["final"];
    assert_eq!(ring(top).0, 1);
    assert_eq!(top["decimal"].as_str().unwrap(), "1.000000000000000000000000000000");
}

#[test]
fn tampered_certificate_is_a_mismatch() {
    let out = cgmt(&["besicovitch", "--stages", "3", "--depth", "24"]);
    let mut report = json(&out);
    report["results"]["extraction"]["certificates"][2]["upper_witness"]["value"] = Value::String("1/2".into());
    let path = write(&scratch("tampered.json"), &report.to_string());
    let r = cgmt(&["cover-verify", "--certificate", &path]);
    assert_eq!(r.status.code(), Some(8));
    let body: Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(body["results"]["certificates"][2]["verdict"], false);
    assert_eq!(body["results"]["certificates"][0]["verdict"], true);
}

#[test]
fn cover_file_is_checked_against_the_tree() {
    let good = write(&scratch("good.json"), r#"{"strings": ["0", "10", "11"], "n": 1, "m": 3}"#);
    let r = json(&cgmt(&["cover-verify", "--cover", &good, "--tree", "full", "--s", "1"]));
    assert_eq!(r["results"]["valid"], true);
    assert_eq!(r["results"]["optimal"], true);
    let bad = write(&scratch("bad.json"), r#"{"strings": ["0", "10"], "n": 1, "m": 3}"#);
    let r = cgmt(&["cover-verify", "--cover", &bad, "--tree", "full"]);
    assert_eq!(r.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&r.stderr).contains("NotACover"));
}

#[test]
fn spec_files_and_builtin_names() {
    let spec = write(&scratch("spec.json"), r#"{"kind": "explicit", "depth": 2, "members": ["", "0", "00", "01"]}"#);
    let r = json(&cgmt(&["measure", "--tree", &spec, "--s", "1", "--depth", "2"]));
    assert_eq!(r["results"]["final"]["decimal"], "0.500000000000000000000000000000");
    let broken = write(&scratch("broken.json"), r#"{"kind": "explicit", "depth": 2, "members": ["", "01"]}"#);
    let r = cgmt(&["measure", "--tree", &broken]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("NotPrefixClosed"));
}

#[test]
fn exit_codes_follow_error_families() {
    assert_eq!(cgmt(&["measure", "--tree", "no-such-tree"]).status.code(), Some(2));
    assert_eq!(cgmt(&["measure", "--s", "x"]).status.code(), Some(2));
    assert_eq!(cgmt(&["cover-verify", "--cover", "/nonexistent/cover.json"]).status.code(), Some(1));
    assert_eq!(cgmt_env(&["verify-suite", "--trials", "50"], "CGMT_DEPTH_CAP", "3").status.code(), Some(3));
    assert_eq!(cgmt(&["besicovitch", "--c", "2", "--depth", "16"]).status.code(), Some(6));
    assert_eq!(cgmt(&["lebesgue-path", "--tree", "dyadic:1/2", "--c", "3/4", "--depth", "16"]).status.code(), Some(7));

    let full = cgmt(&["extract", "--tree", "full", "--c", "1/2", "--s", "1", "--depth", "8"]);
    let report = json(&full);
    assert_eq!(report["results"]["selection"]["Cut"], "01111");
    let path = write(&scratch("extract.json"), &report.to_string());
    assert!(cgmt(&["measure", "--code", &path, "--tree", "full"]).status.success());
    assert!(cgmt(&["measure", "--code", &path, "--tree", "branch-left"]).status.success());
    let r = cgmt(&["measure", "--code", &path, "--tree", "branch-right"]);
    assert_eq!(r.status.code(), Some(4));
}

#[test]
fn lebesgue_baire_and_gadgets() {
    let r = json(&cgmt(&["lebesgue-path", "--tree", "dyadic:3/4", "--c", "3/4"]));
    assert!(r["results"]["path"].as_str().unwrap().starts_with("10111"));
    assert_eq!(r["results"]["length"], 64);

    let r = json(&cgmt(&["baire", "--tree", "dyadic:3/4", "--seed", "2"]));
    assert!(r["results"]["met"].as_array().unwrap().iter().all(|b| b == true));

    let r = json(&cgmt(&["gadget", "--table", "1,3,5,7,9,11,13,15", "--kind", "all"]));
    assert_eq!(r["results"]["all_match"], true);
    assert_eq!(r["results"]["gadgets"].as_array().unwrap().len(), 5);
    assert_eq!(cgmt(&["gadget", "--table", "1,1"]).status.code(), Some(2));
}

#[test]
fn verify_suite_finds_no_mismatches() {
    let r = json(&cgmt(&["verify-suite", "--trials", "200", "--seed", "7"]));
    assert_eq!(r["results"]["all_match"], true);
    assert_eq!(r["seed"], 7);
}

#[test]
fn extraction_commands_bracket_the_target() {
    for cmd in ["extract", "extract-pruned"] {
        let r = json(&cgmt(&[cmd, "--tree", "dyadic:3/4", "--c", "1/2", "--eps", "1/2^4", "--depth", "12"]));
        let b = &r["results"]["bracket"];
        let lo: f64 = b["lower"]["decimal"].as_str().unwrap().parse().unwrap();
        let hi: f64 = b["upper"]["decimal"].as_str().unwrap().parse().unwrap();
        assert!(lo >= 0.5 && hi < 0.5625, "{cmd}: [{lo}, {hi}]");
    }
    let r = json(&cgmt(&["thin", "--tree", "full", "--n", "1", "--depth", "16"]));
    assert_eq!(r["results"]["lower"]["decimal"], "1.000000000000000000000000000000");
}

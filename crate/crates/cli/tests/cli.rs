use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn fdca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdca")).args(args).output().expect("binary runs")
}

fn run(cmd: &str, name: &str, extra: &[&str]) -> (i32, Value) {
    let path = fixture(name);
    let mut args = vec![cmd, "--input", &path];
    args.extend_from_slice(extra);
    let out = fdca(&args);
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().expect("exited"), json)
}

#[test]
fn exit_codes_per_fixture() {
    let cases: &[(&str, &str, &[&str], i32)] = &[
        ("rfd", "rfd_m2_m3.json", &[], 0),
        ("rfd", "rfd_c2_infeasible.json", &[], 0),
        ("rfd", "rfd_malformed.json", &[], 2),
        ("cert", "cert_econd.json", &[], 0),
        ("cert", "cert_dt_in_d.json", &[], 0),
        ("cert", "cert_cor.json", &["--variant", "cor"], 0),
        ("cert", "cert_commutant.json", &["--variant", "commutant"], 0),
        ("cert", "cert_missing_expectation.json", &[], 2),
        ("tower", "tower_collapse.json", &[], 0),
        ("tower", "tower_witness.json", &["--depth", "2"], 0),
        ("tower", "tower_condexp.json", &[], 0),
        ("tower", "tower_noncommuting.json", &[], 3),
        ("tower", "tower_noncommuting.json", &["--mode", "equalD", "--depth", "1"], 0),
        ("tower", "rfd_c2_infeasible.json", &[], 3),
        ("validate", "rfd_m2_m3.json", &[], 0),
        ("validate", "tower_noncommuting.json", &[], 3),
    ];
    for (cmd, name, extra, code) in cases {
        let (got, _) = run(cmd, name, extra);
        assert_eq!(got, *code, "{cmd} {name} {extra:?}");
    }
}

#[test]
fn rfd_reports() {
    let (_, yes) = run("rfd", "rfd_m2_m3.json", &[]);
    assert_eq!(yes["rfd"], true);
    assert_eq!(yes["verified"], true);
    assert_eq!(yes["witness"]["k"], 2);
    assert_eq!(yes["witness"]["l"], 3);
    let (_, no) = run("rfd", "rfd_c2_infeasible.json", &[]);
    assert_eq!(no["rfd"], false);
    assert_eq!(no["verified"], true);
    assert!(no["certificate"]["y"].is_array());
}

#[test]
fn cert_reports() {
    let (_, v) = run("cert", "cert_econd.json", &[]);
    assert_eq!(v["value"], "1");
    assert_eq!(v["verdict"]["conclusion"], "non_injective");
    assert_eq!(v["four_term_agrees"], true);
    let (_, z) = run("cert", "cert_dt_in_d.json", &[]);
    assert_eq!(z["value"], "0");
    assert_eq!(z["verdict"]["conclusion"], "inconclusive");
    let (_, c) = run("cert", "cert_cor.json", &["--variant", "cor"]);
    assert_eq!(c["verdict"]["conclusion"], "non_injective");
    let (_, m) = run("cert", "cert_commutant.json", &["--variant", "commutant"]);
    assert_eq!(m["verdict"]["conclusion"], "non_injective");
}

#[test]
fn errors_are_structured() {
    let (code, e) = run("cert", "cert_missing_expectation.json", &[]);
    assert_eq!(code, 2);
    assert_eq!(e["exit_code"], 2);
    assert!(e["error"].as_str().is_some_and(|s| !s.is_empty()));
    let out = fdca(&["rfd", "--input", "/nonexistent/doc.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn reports_embed_the_input_digest() {
    let path = fixture("rfd_m2_m3.json");
    let text = std::fs::read(&path).unwrap();
    let (_, v) = run("rfd", "rfd_m2_m3.json", &[]);
    assert_eq!(v["input_sha256"], hex::encode(Sha256::digest(&text)));
    assert_eq!(v["command"], "rfd");
    assert!(v["version"].is_string());
}

#[test]
fn reruns_are_byte_identical() {
    for (cmd, name) in [("rfd", "rfd_c2_infeasible.json"), ("cert", "cert_econd.json"), ("tower", "tower_condexp.json")] {
        let path = fixture(name);
        let a = fdca(&[cmd, "--input", &path]).stdout;
        let b = fdca(&[cmd, "--input", &path]).stdout;
        assert!(!a.is_empty());
        assert_eq!(a, b, "{cmd} {name}");
    }
}

#[test]
fn stdin_and_output_file() {
    let text = std::fs::read(fixture("rfd_m2_m3.json")).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_fdca"))
        .arg("rfd")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&text).unwrap();
    let piped = child.wait_with_output().unwrap();
    assert!(piped.status.success());

    let out = std::env::temp_dir().join(format!("fdca-cli-test-{}.json", std::process::id()));
    let status = fdca(&["rfd", "--input", &fixture("rfd_m2_m3.json"), "--output", out.to_str().unwrap()]);
    assert!(status.status.success());
    let written = std::fs::read(&out).unwrap();
    std::fs::remove_file(&out).ok();
    assert_eq!(written, piped.stdout);
}

#[test]
fn tower_report_shape() {
    let (_, v) = run("tower", "tower_witness.json", &["--depth", "1"]);
    let r = &v["report"];
    assert_eq!(r["pass"], true);
    assert_eq!(r["mode"], "equalD");
    assert_eq!(r["depth"], 1);
    assert_eq!(v["representations"], "rfd witness");
    let dims: u64 = r["summand_dims"].as_array().unwrap().iter().map(|s| s["dim"].as_u64().unwrap()).sum();
    assert_eq!(dims, r["total_dim"].as_u64().unwrap());
}

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moment-kernel")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn rationality_reports_moment_witness() {
    let r = report(&["rationality", "--P", "z+1/z", "--q", "1/z", "--curve", "unit_circle"]);
    assert_eq!(r["result"]["verdict"], "not_rational");
    assert_eq!(r["result"]["moment_witness"]["index"], 0);
    assert_eq!(r["tool"], "moment-kernel");
    assert_eq!(r["tolerances"]["zero"], 1e-9);
    assert_eq!(r["tolerances"]["samples"], 20);
}

#[test]
fn bautin_bound() {
    let r = report(&["bautin", "--L", "z^2+1/z", "--mdeg", "3"]);
    assert_eq!(r["result"]["bound"], 7);
    assert_eq!(r["result"]["n_l"], 3);
}

#[test]
fn s5_demo_checks_pass() {
    let r = report(&["s5-demo"]);
    let checks = r["result"]["checks"].as_object().unwrap();
    assert_eq!(checks.len(), 5);
    assert!(checks.values().all(|v| v == true));
    assert_eq!(r["result"]["group_order"], 120);
}

#[test]
fn dvdk_and_laurent_check() {
    let r = report(&["dvdk", "--L", "z + 1/z"]);
    assert_eq!(r["result"]["result"], "witness");
    assert_eq!(r["result"]["index"], 2);
    let r = report(&["laurent-check", "--L", "z^2 + z^-2", "--M", "z + z^3"]);
    assert_eq!(r["result"]["condition_lau"]["holds"], true);
    assert_eq!(r["result"]["structure"]["prime"], 2);
}

#[test]
fn monodromy_and_constellation() {
    let r = report(&["monodromy", "--P", "z^3"]);
    assert_eq!(r["result"]["degree"], 3);
    assert_eq!(r["result"]["order"], 3);
    let r = report(&["constellation", "--P", "z + 1/z", "--curve", "unit_circle"]);
    assert_eq!(r["result"]["f_matrix"].as_array().unwrap().len(), 2);
}

#[test]
fn moments_and_vanishing() {
    let r = report(&["moments", "--P", "z^2 + 1/z", "--q", "1/z", "--N", "4"]);
    assert_eq!(r["result"]["exact"], true);
    assert_eq!(r["result"]["over_two_pi_i"][3][0], "3/1");
    let r = report(&["vanishing", "--P", "z^2", "--q", "z", "--curve", "unit_circle"]);
    assert_eq!(r["result"]["verdict"], "rational_and_zero");
}

#[test]
fn decompose_and_double_moments() {
    let r = report(&["decompose", "--P", "z^2 + 1/z", "--q", "(z^2 + 1/z)*(2z - 1/z^2)"]);
    assert_eq!(r["result"]["generic"]["verdict"], "rational_and_zero");
    let r = report(&[
        "double-moments", "--P", "(z + 1/z)^2", "--q", "z + 1/z", "--W", "z + 1/z", "--Pt", "z^2", "--Qt", "z",
        "--imax", "3", "--jmax", "3",
    ]);
    assert_eq!(r["result"]["max_abs"], 0.0);
}

#[test]
fn admissible_verdict() {
    let r = report(&["admissible", "--P", "z + 1/z", "--curve", "unit_circle"]);
    assert_eq!(r["result"]["verdict"], "reducibility_forced");
    let out = run(&["admissible", "--P", "z^2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inputs_from_json() {
    let r = report(&["bautin", "--input", r#"{"L": "z + 1/z", "mdeg": 3}"#]);
    assert_eq!(r["result"]["bound"], 4);
    assert_eq!(r["inputs"]["mdeg"], 3);
}

#[test]
fn errors_exit_one() {
    assert_eq!(run(&["rationality", "--P", "z+1/z", "--q", "1/z", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["rationality", "--P", "z+", "--q", "1/z"]).status.code(), Some(1));
    assert_eq!(run(&["bautin", "--L", "z^2"]).status.code(), Some(1));
    let out = run(&["rationality", "--P", "z", "--q", "1/z", "--curve", "nowhere"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn deterministic_output() {
    let args = ["rationality", "--P", "z^2+1/z", "--q", "1/z", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn writes_to_out_path() {
    let path = std::env::temp_dir().join(format!("moment-kernel-cli-{}.json", std::process::id()));
    let out = run(&["dvdk", "--L", "z^3 + 1/z", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["index"], 4);
    std::fs::remove_file(path).ok();
}

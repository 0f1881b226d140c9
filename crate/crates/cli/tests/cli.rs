use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polar-morse"))
        .arg("analyze")
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).expect("json on stdout");
    (v, out.status.code().unwrap())
}

#[test]
fn first_example_json() {
    let (v, code) = json(&["--f", "x + x^2*y", "--ell", "x + y"]);
    assert_eq!(code, 0);
    assert_eq!(v["morse_number"], 2);
    assert_eq!(v["input"]["degree"], 3);
    assert!(v["verification"].is_null());
    let att = v["attractors"].as_array().unwrap();
    assert_eq!(att.len(), 2);
    let top = &att[0];
    assert_eq!(top["location"]["type"], "infinity");
    assert_eq!(top["alpha"]["type"], "finite");
    assert_eq!(top["alpha"]["value"]["min_poly"], "t");
    assert_eq!(top["index"], 2);
    assert_eq!(top["branches"][0]["mult_fbar"], 4);
    assert_eq!(top["branches"][0]["mult_hinf"], 1);
    assert_eq!(att[1]["alpha"]["type"], "infinite");
    assert_eq!(att[1]["index"], 0);
}

#[test]
fn second_example_verifies() {
    let (v, code) = json(&["--f", "x*y + 1/3*x^3*y^2", "--ell", "x + y", "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(v["morse_number"], 4);
    assert_eq!(v["verification"]["matched"], true);
    assert_eq!(v["verification"]["t_schedule"].as_array().unwrap().len(), 4);
}

#[test]
fn linear_f_is_empty() {
    let (v, code) = json(&["--f", "x + y"]);
    assert_eq!(code, 0);
    assert_eq!(v["morse_number"], 0);
    assert!(v["attractors"].as_array().unwrap().is_empty());
}

#[test]
fn output_is_deterministic() {
    let args = ["--f", "x^3 - 2*x*y + y^2", "--seed", "11", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn custom_schedule_is_used() {
    let (v, code) = json(&["--f", "x + x^2*y", "--ell", "x + y", "--verify", "--t-schedule", "1e-3,1e-4,1e-5"]);
    assert_eq!(code, 0);
    assert_eq!(v["verification"]["t_schedule"][0], "1/1000");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--f", "x + * y"]).status.code(), Some(2));
    assert_eq!(run(&["--f", "x*y", "--ell", "x*y"]).status.code(), Some(2));
    assert_eq!(run(&["--f", "x*y", "--t-schedule", "abc", "--verify"]).status.code(), Some(2));
    assert_eq!(run(&["--f", "x*y + 1/3*x^3*y^2", "--ell", "y"]).status.code(), Some(3));
}

#[test]
fn text_output() {
    let out = run(&["--f", "x + x^2*y", "--ell", "x + y", "--sequential"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("Morse number: 2"));
    assert!(s.contains("[0 : 1 : 0]"));
}

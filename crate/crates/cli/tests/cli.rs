use std::process::{Command, Output};

use serde_json::Value;

const EXAMPLE: [&str; 6] = ["--factor", "quad:13", "--factor", "quad:17", "--factor", "quad:221"];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multinorm")).args(args).output().expect("binary runs")
}

fn with_example<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(EXAMPLE.iter()).chain(tail).copied().collect()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn sha_of_the_example_is_z2() {
    let out = run(&with_example(&["sha"], &[]));
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("Ш(L) ≅ Z/2\n"));

    let out = run(&with_example(&["sha"], &["--json"]));
    let v = json(&out);
    assert_eq!(v["elementary_divisors"], serde_json::json!([2]));
    assert_eq!(v["order"], 2);
}

#[test]
fn two_quadratics_have_trivial_sha() {
    let out = run(&["sha", "--factor", "quad:13", "--factor", "quad:17", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["order"], 1);
    let out = run(&["sha", "--factor", "quad:13", "--factor", "quad:17"]);
    assert!(stdout(&out).starts_with("Ш(L) ≅ 0\n"));
}

#[test]
fn errors_exit_with_two() {
    let out = run(&["sha", "--factor", "explicit:16:1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cyclic"));
    assert_eq!(run(&["sha"]).status.code(), Some(2));
    assert_eq!(run(&["sha", "--factor", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&with_example(&["decide"], &["--c", "0"])).status.code(), Some(2));
}

#[test]
fn decide_exit_codes() {
    assert_eq!(run(&with_example(&["decide"], &["--c", "1"])).status.code(), Some(0));
    assert_eq!(run(&with_example(&["decide"], &["--c", "-9/4"])).status.code(), Some(0));

    let out = run(&with_example(&["decide"], &["--c", "5", "--json"]));
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["verdict"], "obstructed");
    assert_eq!(v["character"], serde_json::json!([1]));

    let out = run(&["decide", "--factor", "quad:13", "--factor", "quad:17", "--c", "5", "--json"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["verdict"], "no_local");
}

#[test]
fn text_and_json_verdicts_agree() {
    for c in ["1", "2", "3", "5", "7/3", "-13"] {
        let text = run(&with_example(&["decide"], &["--c", c]));
        let js = run(&with_example(&["decide"], &["--c", c, "--json"]));
        assert_eq!(text.status.code(), js.status.code(), "c = {c}");
        let name = json(&js)["verdict"].as_str().unwrap().to_string();
        let word = match name.as_str() {
            "solvable" => "solvable",
            "obstructed" => "obstructed",
            _ => "no local",
        };
        assert!(stdout(&text).contains(word), "c = {c}: {}", stdout(&text));
    }
}

#[test]
fn knot_group_of_the_example() {
    let out = run(&with_example(&["knot"], &["--bound", "20", "--json"]));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["moduli"], serde_json::json!([2]));
    assert_eq!(v["complete"], true);
    assert_eq!(v["representatives"].as_array().unwrap().len(), 1);

    let out = run(&["knot", "--factor", "quad:13", "--factor", "quad:17", "--json"]);
    let v = json(&out);
    assert!(v["representatives"].as_array().unwrap().is_empty());
}

#[test]
fn profile_round_trip() {
    let dir = std::env::temp_dir().join(format!("multinorm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("profile.json");
    let p = path.to_str().unwrap();

    let out = run(&with_example(&["profile"], &["--profile-out", p]));
    assert_eq!(out.status.code(), Some(0));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(saved.as_array().unwrap().len(), 1);

    let out = run(&["profile", "--profile-in", p, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)[0]["invariant_factors"], serde_json::json!([2]));

    // a single object is accepted as well
    std::fs::write(&path, saved[0].to_string()).unwrap();
    let out = run(&["profile", "--profile-in", p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("Ш ≅ Z/2"));

    std::fs::write(&path, r#"{"p": 2}"#).unwrap();
    assert_eq!(run(&["profile", "--profile-in", p]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

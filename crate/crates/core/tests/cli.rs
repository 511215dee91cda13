use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const FOUR_SOURCES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/four_sources.json");

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_quiverstab"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(text) = stdin {
        child.stdin.as_mut().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn hn_on_four_sources() {
    let v = json(&run(&["hn", FOUR_SOURCES], None));
    let dims: Vec<Value> = v["filtration"]["steps"].as_array().unwrap().iter().map(|s| s["dims"].clone()).collect();
    assert_eq!(dims, vec![serde_json::json!([0, 1, 1, 0, 1]), serde_json::json!([1, 1, 1, 1, 3]), serde_json::json!([1, 1, 1, 1, 4])]);
    assert_eq!(v["filtration"]["slopes"], serde_json::json!(["4/3", "0", "-4"]));
    assert_eq!(v["verify"]["quotients_semistable"], true);
}

#[test]
fn check_on_the_last_four_sources_quotient() {
    let quotient = r#"{
        "quiver": {"vertices": ["x1", "x2", "x3", "x4", "y"],
                   "arrows": [{"id": "a4", "tail": "x4", "head": "y"}]},
        "dims": {"x1": 0, "x2": 0, "x3": 0, "x4": 0, "y": 1},
        "maps": {"a4": [[]]},
        "theta": {"x1": 4, "x2": 4, "x3": 4, "x4": 4, "y": -4}
    }"#;
    let v = json(&run(&["check", "-"], Some(quotient)));
    assert_eq!(v["semistable"], true);
    assert_eq!(v["G"], 0);
    let v = json(&run(&["check", FOUR_SOURCES], None));
    assert_eq!(v["semistable"], false);
    assert_eq!(v["G"], 32);
}

#[test]
fn disc_on_the_zero_representation() {
    let zero = r#"{"quiver": {"vertices": ["a", "b"], "arrows": [{"id": "f", "tail": "a", "head": "b"}]},
                   "dims": {"a": 0, "b": 0}, "maps": {"f": []}, "theta": {"a": 1, "b": -1}}"#;
    let out = run(&["disc", "-"], Some(zero));
    assert_eq!(json(&out)["value"], 0);
}

#[test]
fn malformed_input_exits_with_one() {
    let out = run(&["hn", "-"], Some("{not json"));
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let out = run(&["hn", "/nonexistent/instance.json"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_byte_identical() {
    for cmd in ["hn", "kempf", "disc", "check"] {
        let a = run(&[cmd, "--seed", "5", FOUR_SOURCES], None);
        let b = run(&[cmd, "--seed", "5", FOUR_SOURCES], None);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn kempf_on_four_sources() {
    let v = json(&run(&["kempf", "--convention", "tinf", FOUR_SOURCES], None));
    assert_eq!(v["u"], serde_json::json!(["4/3", "0", "-4"]));
    assert_eq!(v["primitive"], serde_json::json!([[0], [1], [1], [0], [1, 0, 0, -3]]));
    assert_eq!(v["instability_sq"], "64/3");
    assert_eq!(v["limit"]["constraints"], serde_json::json!(["-a1+a6>=0", "-a2+a5>=0", "-a3+a5>=0", "-a4+a7>=0"]));
    assert_eq!(v["limit"]["exists"], true);
    assert_eq!(v["kempf_function_check"]["violations"], 0);
}

#[test]
fn certificates_round_trip_and_tampering_is_caught() {
    let disc = run(&["disc", FOUR_SOURCES], None);
    let text = String::from_utf8(disc.stdout.clone()).unwrap();
    let v = json(&run(&["verify-certificate", "-"], Some(&text)));
    assert_eq!(v["valid"], true);

    let mut doc: Value = serde_json::from_str(&text).unwrap();
    let c = doc["certificate"]["c"].as_u64().unwrap();
    doc["certificate"]["c"] = (c + 1).into();
    let out = run(&["verify-certificate", "-"], Some(&doc.to_string()));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generated_instances_feed_the_oracle() {
    let out = run(&["gen", "--seed", "1", "--class", "bipartite"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v = json(&run(&["oracle", "-"], Some(&text)));
    assert!(v["max_slope"].is_string());
    let many = json(&run(&["gen", "--count", "3", "--class", "general-zero-theta"], None));
    assert_eq!(many.as_array().unwrap().len(), 3);
}

#[test]
fn kempf_reports_semistable_instances() {
    let flat = r#"{"quiver": {"vertices": ["a"], "arrows": []}, "dims": {"a": 2}, "maps": {}}"#;
    let v = json(&run(&["kempf", "-"], Some(flat)));
    assert_eq!(v["semistable"], true);
}

mod checker;

use std::path::{Path, PathBuf};
use std::process::Command;

use num_rational::BigRational;
use num_traits::Signed;
use serde_json::Value;
use tempfile::TempDir;

use checker::q;

fn mipo(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mipo"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, text) = mipo(args);
    let v = serde_json::from_str(&text).unwrap_or_else(|e| panic!("bad JSON ({e}): {text}"));
    (code, v)
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn generated(dir: &TempDir, args: &[&str], name: &str) -> PathBuf {
    let (code, text) = mipo(args);
    assert_eq!(code, 0);
    write(dir, name, &text)
}

fn parity(dir: &TempDir) -> PathBuf {
    generated(dir, &["generate", "--family", "parity"], "parity.json")
}

fn an1(dir: &TempDir) -> PathBuf {
    generated(dir, &["generate", "--family", "an1", "--a", "2", "--b", "7", "--c", "10"], "an1.json")
}

fn instance_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn oracle_parity_even_and_odd() {
    let dir = TempDir::new().unwrap();
    let p = parity(&dir);
    let (code, v) = report(&["optimize", s(&p), "--oracle", "--grid-m", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["solution"]["value"], "3/2");
    assert_eq!(v["solution"]["point"]["x"][0], "1/2");
    assert_eq!(v["solution"]["point"]["z"][0], "1");

    let (code, v) = report(&["optimize", s(&p), "--oracle", "--grid-m", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["solution"]["value"], "0");
    assert_eq!(v["solution"]["point"]["x"][0], "0");
    assert_eq!(v["solution"]["point"]["z"][0], "0");
}

#[test]
fn weak_on_an1() {
    let dir = TempDir::new().unwrap();
    let p = an1(&dir);
    let (_, oracle) = report(&["optimize", s(&p), "--oracle"]);
    let fmax = q(&oracle["solution"]["value"]);
    let fmin = q(&oracle["minimum"]["value"]);
    assert_eq!(fmax, r(0, 1));
    let (code, v) = report(&["optimize", s(&p), "--weak", "--epsilon", "1/4"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
    let value = q(&v["solution"]["value"]);
    assert!((value - &fmax).abs() <= r(1, 4) * (fmax - fmin));
    checker::replay(&instance_json(&p), &v["solution"]).unwrap();
}

#[test]
fn fptas_report_replays_independently() {
    let dir = TempDir::new().unwrap();
    let text = r#"{"d1": 1, "d2": 1,
        "A": [[-2], [2], [-1], [0], [0]], "B": [[1], [1], [0], [1], [-1]], "b": [0, 2, 0, 1, 0],
        "objective": [{"exponents": [0, 1], "coefficient": "2"},
                      {"exponents": [1, 0], "coefficient": "-1"},
                      {"exponents": [0, 0], "coefficient": "1"}]}"#;
    let p = write(&dir, "shifted.json", text);
    let (code, v) = report(&["optimize", s(&p), "--epsilon", "1/2"]);
    assert_eq!(code, 0);
    assert_eq!(v["solution"]["value"], "5/2");
    assert_eq!(v["solution"]["certificate"]["grid_m"], "192");
    checker::replay(&instance_json(&p), &v["solution"]).unwrap();

    // the checker notices a doctored value
    let mut bad = v["solution"].clone();
    bad["value"] = Value::String("3".into());
    assert!(checker::replay(&instance_json(&p), &bad).is_err());
    let mut bad = v["solution"].clone();
    bad["certificate"]["plan"]["m"] = Value::String("190".into());
    assert!(checker::replay(&instance_json(&p), &bad).is_err());
}

#[test]
fn weak_report_on_parity_replays() {
    let dir = TempDir::new().unwrap();
    let p = parity(&dir);
    let (code, v) = report(&["optimize", s(&p), "--weak", "--epsilon", "1/3"]);
    assert_eq!(code, 0);
    checker::replay(&instance_json(&p), &v["solution"]).unwrap();
}

#[test]
fn auxiliary_commands() {
    let dir = TempDir::new().unwrap();
    let p = parity(&dir);
    let (code, v) = report(&["count", s(&p), "--grid-m", "2"]);
    assert_eq!((code, v["count"].as_str()), (0, Some("4")));
    let (code, v) = report(&["delta", s(&p)]);
    assert_eq!((code, v["delta"].as_str()), (0, Some("2")));

    let (code, v) = report(&["constant", s(&p)]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["constant"], false);
    let (_, v2) = report(&["count", s(&p), "--grid-m", v["grid_m"].as_str().unwrap()]);
    assert!(v2["count"].as_str().unwrap().parse::<u32>().unwrap() >= 2);

    let (code, v) = report(&["range", s(&p), "--delta", "1/2", "--n", "3"]);
    assert_eq!(code, 0);
    let trace = v["trace"].as_array().unwrap();
    assert_eq!(trace.len(), 4);
    for st in trace {
        assert!(q(&st["lower"]) <= r(-1, 1) && r(3, 2) <= q(&st["upper"]));
    }

    let box_text = r#"{"d1": 0, "d2": 1, "A": [[], []], "B": [[1], [-1]], "b": [2, 0],
        "objective": [{"exponents": [2], "coefficient": "1"}]}"#;
    let b = write(&dir, "box.json", box_text);
    let (code, v) = report(&["bounds", s(&b), "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["bounds"]["lower"], "3");
    assert_eq!(v["bounds"]["upper"], "4");
}

#[test]
fn constant_status() {
    let dir = TempDir::new().unwrap();
    let text = r#"{"d1": 0, "d2": 1, "A": [[], []], "B": [[1], [-1]], "b": [2, 0],
        "objective": [{"exponents": [0], "coefficient": "7"}]}"#;
    let p = write(&dir, "seven.json", text);
    let (code, v) = report(&["constant", s(&p)]);
    assert_eq!((code, v["status"].as_str()), (0, Some("constant")));
    let (code, v) = report(&["optimize", s(&p), "--epsilon", "1/3"]);
    assert_eq!((code, v["status"].as_str()), (0, Some("constant")));
    assert_eq!(v["solution"]["value"], "7");
}

#[test]
fn generate_round_trip_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    for (args, name) in [
        (vec!["generate", "--family", "parity"], "p.json"),
        (vec!["generate", "--family", "an1", "--a", "2", "--b", "7", "--c", "10"], "a.json"),
        (vec!["generate", "--family", "an1", "--a", "1", "--b", "1", "--c", "2"], "t.json"),
    ] {
        let (_, text) = mipo(&args);
        let parsed = mipo_core::Instance::from_json(&text).unwrap();
        assert_eq!(parsed.to_json(), text);
        let p = write(&dir, name, &text);
        // the generated file loads through the CLI
        let (code, _) = report(&["delta", s(&p)]);
        assert_eq!(code, 0);
    }
    let (_, text) = mipo(&["generate", "--family", "an1", "--a", "2", "--b", "7", "--c", "10"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["b"], serde_json::json!([-1, 9, 1, 79]));
    let (_, v) = report(&["count", s(&write(&dir, "tiny.json", &mipo(&["generate", "--family", "an1", "--a", "1", "--b", "1", "--c", "2"]).1)), "--grid-m", "1"]);
    assert_eq!(v["count"], "1");
}

#[test]
fn exit_codes_follow_status() {
    let dir = TempDir::new().unwrap();
    let (code, v) = report(&["delta", "/nonexistent/file.json"]);
    assert_eq!((code, v["status"].as_str()), (2, Some("error")));

    let bad = write(&dir, "bad.json", "{\"d1\": 0,\n \"d2\": true}");
    let (code, v) = report(&["delta", s(&bad)]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("line 2"));

    let (code, v) = report(&["generate", "--family", "an1", "--a", "0", "--b", "1", "--c", "1"]);
    assert_eq!((code, v["status"].as_str()), (2, Some("error")));

    let (code, _) = report(&["optimize", s(&parity(&dir)), "--epsilon", "0.5"]);
    assert_eq!(code, 2);
    let (code, _) = report(&["optimize", s(&parity(&dir)), "--epsilon", "3/2"]);
    assert_eq!(code, 2);

    let empty = write(
        &dir,
        "empty.json",
        r#"{"d1": 1, "d2": 0, "A": [[1], [-1]], "B": [[], []], "b": [0, -1],
            "objective": [{"exponents": [1], "coefficient": "1"}]}"#,
    );
    let (code, v) = report(&["optimize", s(&empty)]);
    assert_eq!((code, v["status"].as_str()), (3, Some("infeasible")));

    let ray = write(
        &dir,
        "ray.json",
        r#"{"d1": 1, "d2": 0, "A": [[-1]], "B": [[]], "b": [0],
            "objective": [{"exponents": [1], "coefficient": "1"}]}"#,
    );
    let (code, v) = report(&["optimize", s(&ray)]);
    assert_eq!((code, v["status"].as_str()), (3, Some("unbounded")));

    let p = parity(&dir);
    let shifted = write(
        &dir,
        "shifted.json",
        &std::fs::read_to_string(&p)
            .unwrap()
            .replace("\"objective\": [", "\"objective\": [\n{\"exponents\": [0, 0], \"coefficient\": \"1\"},"),
    );
    let (code, v) = report(&["optimize", s(&shifted), "--max-points", "10"]);
    assert_eq!((code, v["status"].as_str()), (4, Some("refused-size")));
    assert_eq!(v["details"]["m"], "192");
    let (code, v) = report(&["optimize", s(&shifted), "--max-points", "10", "--grid-m", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["solution"]["certificate"]["certified"], false);
}

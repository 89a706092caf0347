use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};

fn run(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_topofair")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn sperner_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "t.json", &run(&["tri", "kuhn", "--n", "3", "--k", "4"]));
    let l1 = run(&["label", "random-sperner", "--tri", &tri, "--seed", "1"]);
    let l2 = run(&["label", "random-sperner", "--tri", &tri, "--seed", "2"]);
    assert_eq!(l1["kind"], "sperner");
    let labs = write(dir.path(), "l.json", &json!([l1, l2]));
    let v = run(&["label", "validate", "--tri", &tri, "--labelings", &labs]);
    assert_eq!(v["violations"], json!([[], []]));
    let out = run(&["sperner", "solve", "--tri", &tri, "--labelings", &labs, "--k", "2,2"]);
    assert_eq!(out["simplex"].as_array().unwrap().len(), 3);
    let out = run(&["sperner", "solve", "--tri", &tri, "--labelings", &labs, "--l", "1,1,2"]);
    assert!(out["counts"][2].as_u64().unwrap() >= 2);
    let one = write(dir.path(), "one.json", &l1);
    assert_eq!(run(&["sperner", "count", "--tri", &tri, "--labelings", &one])["diff"].as_i64().unwrap().abs(), 1);
}

#[test]
fn fan_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(dir.path(), "s.json", &run(&["tri", "sphere", "--n", "3", "--r", "1"]));
    let lab = run(&["label", "random-fan", "--tri", &tri, "--bound", "4", "--seed", "3"]);
    let one = write(dir.path(), "f.json", &lab);
    let a = run(&["fan", "search", "--tri", &tri, "--labeling", &one]);
    assert_eq!(a["sign"], -1);
    assert_eq!(a["vertices"].as_array().unwrap().len(), 3);
    let two = write(dir.path(), "ff.json", &json!([lab, run(&["label", "random-fan", "--tri", &tri, "--bound", "4", "--seed", "4"])]));
    let m = run(&["fan", "multi", "--tri", &tri, "--labelings", &two, "--d", "1,1"]);
    assert_eq!(m["faces"].as_array().unwrap().len(), 2);
    let g = run(&["graph", "colorful", "--graph", "K4", "--colorings", &write(dir.path(), "c.json", &json!([[1, 2, 3, 4]])), "--d", "2", "--index", "2"]);
    assert_eq!(g["witnesses"].as_array().unwrap().len(), 1);
}

#[test]
fn fair_division_commands() {
    let dir = tempfile::tempdir().unwrap();
    let uniform = json!({"breakpoints": [0, 1], "densities": [1]});
    let vals = write(dir.path(), "v.json", &json!([uniform, uniform, uniform]));
    let out = run(&["cake", "--valuations", &vals]);
    assert_eq!(out["status"], "certified");
    assert_eq!(out["division"].as_array().unwrap().len(), 3);
    let out = run(&["cake", "--valuations", &vals, "--mode", "survivor", "--param", "2"]);
    assert_eq!(out["scenarios"].as_array().unwrap().len(), 3);
    let rent = write(dir.path(), "r.json", &json!([[300, 900], [700, 500], [600, 600]]));
    assert_eq!(run(&["rent", "--values", &rent, "--total", "1200"])["kind"], "rent");
    let wages = write(dir.path(), "w.json", &json!({"quotas": [2, 1], "budget": 90, "utilities": [[1, 2], [3, 1], [2, 2]]}));
    assert_eq!(run(&["wages", "--problem", &wages])["status"], "certified");
    let prob = write(dir.path(), "p.json", &json!({"kind": "cake", "mode": "survivor", "param": 2, "players": 3}));
    let out = run(&["lazy", "--problem", &prob, "--preferences", &vals]);
    assert_eq!(out["outcome"]["status"], "resolution_limited");
    let m = write(dir.path(), "m.json", &json!([[uniform]]));
    let out = run(&["halving", "--measures", &m, "--n", "2", "--k", "2"]);
    assert_eq!(out["status"], "certified");
}

#[test]
fn errors_exit_nonzero() {
    let out = Command::new(env!("CARGO_BIN_EXE_topofair")).args(["tri", "kuhn", "--n", "0", "--k", "2"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

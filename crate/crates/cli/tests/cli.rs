use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn machine(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../machines")
        .join(format!("{name}.machine"))
        .display()
        .to_string()
}

fn gvm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gvm")).args(args).output().expect("gvm runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gvm-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn run_prints_verdict_and_masses() {
    let o = gvm(&["run", &machine("one"), "11"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("verdict: accept"), "{s}");
    assert!(s.contains("accept mass: 1/1"), "{s}");

    let o = gvm(&["run", &machine("one"), "0"]);
    assert!(stdout(&o).contains("verdict: reject"));
}

#[test]
fn run_writes_trace_and_dot() {
    let dir = scratch("trace");
    let o = gvm(&["run", &machine("ten"), "01", "--json", "--dot", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = std::fs::read_to_string(dir.join("ten-01.jsonl")).unwrap();
    let last: serde_json::Value = serde_json::from_str(trace.lines().last().unwrap()).unwrap();
    assert_eq!(last["verdict"], "accept");
    let dot = std::fs::read_to_string(dir.join("ten-01.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("style=dashed") && dot.contains("bold=true"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn exhausted_budget_exits_undetermined() {
    let o = gvm(&["run", &machine("bounce"), "1", "--max-steps", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("verdict: undetermined"));
}

#[test]
fn language_agrees_with_simulation() {
    let o = gvm(&["language", &machine("wander"), "--test", "conl", "--max-len", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_str(stdout(&o).lines().last().unwrap()).unwrap();
    assert_eq!(summary["mismatches"], 0);
    assert_eq!(summary["test"], "conl");
}

#[test]
fn probabilistic_language_reports_exact_masses() {
    let o = gvm(&["language", &machine("coin"), "--max-len", "2", "--cutpoint", "1/3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("prob(1/3)"), "{s}");
    assert!(s.lines().any(|l| l.starts_with("0\t") && l.split('\t').count() == 5));
}

#[test]
fn experiments_print_json_lines() {
    let o = gvm(&["experiment", "cost", "--i", "2", "--depth", "2"]);
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[2]["partial"], "3/8");
    assert_eq!(lines[2]["total"], "1/2");

    let o = gvm(&["experiment", "separation", "--i", "2", "--j", "3", "--max-word-len", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"consistent\":true"));
}

#[test]
fn experiments_are_reproducible() {
    let a = stdout(&gvm(&["experiment", "closure", "--class", "prob", "--seed", "5", "--n", "10"]));
    let b = stdout(&gvm(&["experiment", "closure", "--class", "prob", "--seed", "5", "--n", "10"]));
    assert_eq!(a, b);
    assert!(a.contains("\"checked\":10"));
}

#[test]
fn encode_word_as_json_and_dot() {
    let o = gvm(&["encode", "word", "01"]);
    let g: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    // forward and backward edge per position of *01
    assert_eq!(g["edges"].as_array().unwrap().len(), 6);

    let o = gvm(&["encode", "word", "01", "--one-way", "--dot"]);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches(" -> ").count(), 3);
}

#[test]
fn validate_reports_each_file() {
    let o = gvm(&["validate", &machine("one"), &machine("relay")]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("name=one") && s.contains("class=probabilistic"), "{s}");
}

#[test]
fn exit_codes() {
    let dir = scratch("bad");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.machine");
    std::fs::write(&bad, "name: x\nheads: two\n").unwrap();
    assert_eq!(gvm(&["validate", bad.to_str().unwrap()]).status.code(), Some(4));
    assert_eq!(gvm(&["run", &machine("one"), "2"]).status.code(), Some(4));
    assert_eq!(gvm(&["run", "/no/such/file", "0"]).status.code(), Some(5));
    assert_eq!(gvm(&["run"]).status.code(), Some(2));
    assert_eq!(gvm(&["run", &machine("one"), "0", "--cutpoint", "0.5"]).status.code(), Some(4));
    let _ = std::fs::remove_dir_all(&dir);
}

mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::corpus;

fn asm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asm"))
        .args(args)
        .output()
        .expect("asm runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_even_with_parity_table() {
    let o = asm(&[
        "run",
        path(&corpus("even.asm")),
        "--input",
        "4",
        "--oracle",
        path(&corpus("parity.json")),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "{\"status\":\"OutputProduced\",\"output\":true}\n");
}

#[test]
fn pruned_bundle_runs_without_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("b.asm");
    let o = asm(&["prune", path(&corpus("evenodd.bundle.json")), "-o", path(&b)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = asm(&["run", path(&b), "--input", "4"]);
    assert_eq!(stdout(&o), "{\"status\":\"OutputProduced\",\"output\":true}\n");
    let o = asm(&["run", path(&b), "--input", "7"]);
    assert_eq!(stdout(&o), "{\"status\":\"OutputProduced\",\"output\":false}\n");
}

#[test]
fn bundle_runs_by_dispatch() {
    let o = asm(&["run", path(&corpus("factorial.bundle.json")), "--input", "5"]);
    assert_eq!(stdout(&o), "{\"status\":\"OutputProduced\",\"output\":120}\n");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("bad.asm");
    std::fs::write(&garbage, "program\nif then").unwrap();
    assert_eq!(asm(&["check", path(&corpus("watchdog.asm"))]).status.code(), Some(0));
    assert_eq!(asm(&["check", path(&garbage)]).status.code(), Some(3));
    assert_eq!(asm(&["check", path(&corpus("arity_mismatch.asm"))]).status.code(), Some(4));
    let o = asm(&["run", path(&corpus("contradiction.asm")), "--input", "1"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stdout(&o).contains("Contradiction"));
    assert_eq!(asm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(asm(&["check", path(&dir.path().join("missing.asm"))]).status.code(), Some(1));
}

#[test]
fn json_errors() {
    let o = asm(&["--json", "check", path(&corpus("arity_mismatch.asm"))]);
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "check");
    assert_eq!(err["exit"], 4);
}

#[test]
fn transforms_compose() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["watchdog.asm", "even.asm", "factorial.asm", "fib_a.asm", "double.asm", "swap.asm", "relativized.asm"] {
        let mut current = corpus(f);
        for pass in ["separate", "normalize", "serialize"] {
            let next = dir.path().join(format!("{pass}-{f}"));
            let o = asm(&[pass, path(&current), "-o", path(&next)]);
            assert_eq!(o.status.code(), Some(0), "{pass} {f}: {}", String::from_utf8_lossy(&o.stderr));
            let o = asm(&["check", path(&next)]);
            assert_eq!(o.status.code(), Some(0), "check after {pass} {f}: {}", String::from_utf8_lossy(&o.stderr));
            current = next;
        }
    }
}

#[test]
fn artifacts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("s{k}.asm"));
        let cls = dir.path().join(format!("s{k}.json"));
        let o = asm(&[
            "serialize",
            path(&corpus("factorial.asm")),
            "-o",
            path(&out),
            "--emit-classification",
            path(&cls),
        ]);
        assert_eq!(o.status.code(), Some(0));
        let report = asm(&["cosim", "--pass", "serialize", "--seed", "7", "--count", "5", "--steps", "10"]);
        assert_eq!(report.status.code(), Some(0));
        outputs.push((std::fs::read(&out).unwrap(), std::fs::read(&cls).unwrap(), report.stdout));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn trace_is_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.jsonl");
    let o = asm(&["run", path(&corpus("double.asm")), "--input", "3", "--trace", path(&t)]);
    assert_eq!(stdout(&o), "{\"status\":\"OutputProduced\",\"output\":6}\n");
    let text = std::fs::read_to_string(&t).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    // load, three countdown steps, then the output step
    assert_eq!(lines.len(), 5 + 1);
    assert_eq!(lines[0]["step"], 0);
    assert_eq!(lines[5]["steps"], 5);
    assert_eq!(lines[5]["output"], 6);
}

#[test]
fn cosim_reports_pass() {
    let o = asm(&["cosim", "--pass", "normalize", "--count", "20", "--steps", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["status"], "pass");
    assert_eq!(r["passed"], 20);
}

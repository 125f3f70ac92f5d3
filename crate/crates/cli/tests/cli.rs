use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mpesp::fixtures;
use mpesp::io::{parse_solution, write_instance, write_solution, SolutionFile};
use mpesp::network::{ActivityKind, EventActivityNetwork, EventId, NetworkBuilder};
use mpesp::num::rat;
use mpesp::routing::ODMatrix;
use serde_json::Value;

fn mpesp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpesp")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, net: &EventActivityNetwork, od: Option<&ODMatrix>) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, write_instance(net, od).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_figure_three_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "f3.txt", &fixtures::figure3(), None);
    let sol = dir.path().join("f3.sol");
    for formulation in ["cycle", "arc"] {
        let out = mpesp(&["solve", s(&inst), "--formulation", formulation, "-o", s(&sol)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let parsed = parse_solution(&std::fs::read_to_string(&sol).unwrap()).unwrap();
        assert_eq!(parsed.status, "optimal");
        assert_eq!(parsed.objective, Some(rat(32)));
        let out = mpesp(&["verify", s(&inst), s(&sol)]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout_json(&out)["valid"], Value::Bool(true));
    }
}

#[test]
fn pesp_representation_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "f3.txt", &fixtures::figure3(), None);
    let out = mpesp(&["solve", s(&inst), "--representation", "pesp"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed = parse_solution(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(parsed.objective, Some(rat(32)));
}

#[test]
fn warm_start_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "f3.txt", &fixtures::figure3(), None);
    let sol = dir.path().join("first.sol");
    assert_eq!(mpesp(&["solve", s(&inst), "-o", s(&sol)]).status.code(), Some(0));
    let out = mpesp(&["solve", s(&inst), "--warm-start", s(&sol), "--node-limit", "0"]);
    let parsed = parse_solution(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(parsed.objective, Some(rat(32)));
}

#[test]
fn infeasible_instance_exits_with_certificate() {
    let mut b = NetworkBuilder::new();
    let e: Vec<EventId> = (0..3).map(|k| b.add_event(k, 10, "")).collect();
    for k in 0..3 {
        b.add_activity(k as u32, e[k], e[(k + 1) % 3], 1, 1, rat(1), ActivityKind::Drive);
    }
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "tri.txt", &b.build().unwrap(), None);
    let out = mpesp(&["solve", s(&inst)]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let report: Value = serde_json::from_str(stderr.lines().last().unwrap()).unwrap();
    assert_eq!(report["certificate"]["kind"], "empty_offset_range");
    assert_eq!(mpesp(&["oracle", s(&inst)]).status.code(), Some(3));
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(mpesp(&["solve", "--no-such-flag", "x"]).status.code(), Some(2));
    assert_eq!(mpesp(&["frobnicate"]).status.code(), Some(2));
    let out = mpesp(&["inspect", "/definitely/not/here.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "# mpesp-instance v1\n[events]\n0; ten; a\n").unwrap();
    let out = mpesp(&["inspect", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn generate_is_seeded_and_readable() {
    let a = mpesp(&["generate", "--seed", "11"]);
    let b = mpesp(&["generate", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    for kind in ["random", "harmonic", "rooted"] {
        let path = dir.path().join(format!("{kind}.txt"));
        assert!(mpesp(&["generate", "--seed", "4", "--kind", kind, "-o", s(&path)]).status.success());
        let class = stdout_json(&mpesp(&["classify", s(&path)]));
        match kind {
            "harmonic" => assert_eq!(class["class"], "harmonic"),
            "rooted" => assert_ne!(class["class"], "neither"),
            _ => {}
        }
        let info = stdout_json(&mpesp(&["inspect", s(&path)]));
        assert!(info["events"].as_u64().unwrap() >= 2);
    }
}

#[test]
fn rooted_instance_and_sharp_tree() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "tri.txt", &fixtures::triangle(4, 6, 10), None);
    let rooted = dir.path().join("rooted.txt");
    let report = stdout_json(&mpesp(&["root", s(&inst), "-o", s(&rooted)]));
    assert!(!report["added_events"].as_array().unwrap().is_empty());
    assert_ne!(stdout_json(&mpesp(&["classify", s(&rooted)]))["class"], "neither");
    let tree = stdout_json(&mpesp(&["tree", s(&inst)]));
    assert_eq!(tree["sharp"], Value::Bool(true));
    let basis = stdout_json(&mpesp(&["basis", s(&rooted)]));
    let cycles = basis["cycles"].as_array().unwrap();
    let info = stdout_json(&mpesp(&["inspect", s(&rooted)]));
    let (n, m) = (info["events"].as_u64().unwrap(), info["activities"].as_u64().unwrap());
    assert_eq!(cycles.len() as u64, m - n + 1);
}

#[test]
fn export_lp_and_mps() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "f3.txt", &fixtures::figure3(), None);
    let lp = String::from_utf8(mpesp(&["export-mip", s(&inst)]).stdout).unwrap();
    assert!(lp.contains("Minimize") && lp.contains("End"));
    let mps = dir.path().join("f3.mps");
    assert!(mpesp(&["export-mip", s(&inst), "--formulation", "arc", "--format", "mps", "-o", s(&mps)]).status.success());
    let text = std::fs::read_to_string(&mps).unwrap();
    assert!(text.starts_with("NAME") && text.trim_end().ends_with("ENDATA"));
    let summary = stdout_json(&mpesp(&["build", "cycle", "mpesp", s(&inst)]));
    assert_eq!(summary["integer"], summary["constraints"]);
}

#[test]
fn evaluate_figure_ten() {
    let (net, od, tt) = fixtures::figure10();
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "f10.txt", &net, Some(&od));
    let sol = dir.path().join("f10.sol");
    let file = SolutionFile { status: "feasible".into(), timetable: Some(tt), ..Default::default() };
    std::fs::write(&sol, write_solution(&file)).unwrap();
    let out = stdout_json(&mpesp(&["evaluate", s(&inst), "--solution", s(&sol)]));
    assert_eq!(out["network_travel_time"], "25");
    assert_eq!(out["exact_travel_time"], "55");
    let routed = mpesp(&["route", s(&inst), "--solution", s(&sol)]);
    assert!(routed.status.success());
    let it = mpesp(&["iterate", s(&inst)]);
    assert!(it.status.success(), "{}", String::from_utf8_lossy(&it.stderr));
}

#[test]
fn expand_writes_a_single_period_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "tri.txt", &fixtures::triangle(2, 3, 6), None);
    let out = dir.path().join("pesp.txt");
    let run = mpesp(&["expand", s(&inst), "-o", s(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let report = stdout_json(&run);
    assert_eq!(report["period"], 6);
    let info = stdout_json(&mpesp(&["inspect", s(&out)]));
    assert_eq!(info["periods"], serde_json::json!([6]));
    assert_eq!(info["events"], report["events"]);
}

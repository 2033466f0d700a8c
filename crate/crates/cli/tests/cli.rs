use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn cpomcp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpomcp")).args(args).output().unwrap()
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cpomcp-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn solve_prints_a_csv_report() {
    let out = cpomcp(&[
        "solve", "--instance", "doors3", "--heuristic", "hadd,random", "--simulations", "100", "--episodes", "2",
        "--no-timing",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "instance,heuristic,simulations,success_rate,avg_cost,avg_step_secs");
    assert!(lines[1].starts_with("doors3,hadd,100,"));
    assert!(lines[2].starts_with("doors3,random,100,"));
    assert_eq!(lines.len(), 3);
}

#[test]
fn gen_output_can_be_solved_from_files() {
    let dir = scratch("gen");
    let out = cpomcp(&["gen", "blocks", "--size", "3", "--seed", "1", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let written: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(written.len(), 2);
    let report = dir.join("report.json");
    let out = cpomcp(&[
        "solve", "--domain", &written[0], "--problem", &written[1], "--simulations", "200", "--episodes", "2",
        "--exploration-c", "20", "--format", "json", "--out", report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = fs::read_to_string(&report).unwrap();
    fs::remove_dir_all(&dir).ok();
    assert!(json.contains("\"heuristic\": \"hadd-belief\""), "{json}");
    assert!(json.contains("\"cost_all_capped\""));
}

#[test]
fn configuration_errors_exit_with_two() {
    let out = cpomcp(&["solve", "--instance", "doors3", "--heuristic", "ff", "--episodes", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown heuristic"));

    let out = cpomcp(&["solve", "--instance", "nosuch9", "--episodes", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = scratch("bad");
    let d = dir.join("d.pddl");
    fs::write(&d, "(define (domain broken").unwrap();
    let d = d.to_str().unwrap().to_string();
    let out = cpomcp(&["solve", "--domain", &d, "--problem", &d, "--episodes", "1"]);
    fs::remove_dir_all(&dir).ok();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_files_exit_with_an_error() {
    let out = cpomcp(&["solve", "--domain", "/nonexistent/d.pddl", "--problem", "/nonexistent/p.pddl"]);
    assert_eq!(out.status.code(), Some(1));
}

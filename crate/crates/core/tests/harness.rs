use std::fs;

use contingent_pomcp::harness::{
    emit, parse_json, run_batch, run_batch_on, ExperimentConfig, Format, HarnessError, ProblemSource, ResultRow,
};
use contingent_pomcp::heuristics::PolicyRegistry;
use contingent_pomcp::parser::parse;
use contingent_pomcp::pomcp::{Budget, SearchConfig};

const LINE: &str = "(define (domain line)
  (:types cell)
  (:predicates (at ?c - cell) (next ?a ?b - cell))
  (:action right
    :parameters (?a ?b - cell)
    :precondition (and (at ?a) (next ?a ?b))
    :effect (and (not (at ?a)) (at ?b)))
  (:action left
    :parameters (?a ?b - cell)
    :precondition (and (at ?b) (next ?a ?b))
    :effect (and (not (at ?b)) (at ?a))))";

fn line_problem(start: &str, goal: &str) -> String {
    format!(
        "(define (problem p) (domain line)
  (:constants c0 c1 c2 c3 - cell)
  (:init (at {start}) (next c0 c1) (next c1 c2) (next c2 c3))
  (:goal (at {goal})))"
    )
}

fn config(policy: &str, sims: u32) -> ExperimentConfig {
    let search = SearchConfig {
        budget: Budget::Simulations(sims),
        policy: policy.into(),
        exploration_c: 20.0,
        ..Default::default()
    };
    let mut cfg = ExperimentConfig::new(ProblemSource::Instance("doors3".into()), search);
    cfg.timing = false;
    cfg
}

#[test]
fn goal_at_start_costs_nothing() {
    let p = parse(LINE, &line_problem("c2", "c2")).unwrap();
    let row = run_batch_on(&p, "line", &config("hadd", 100), &PolicyRegistry::default()).unwrap();
    assert_eq!(row.episodes.len(), 20);
    assert_eq!(row.success_rate, 1.0);
    assert_eq!(row.avg_cost, Some(0.0));
    assert_eq!(row.cost_all_capped, 0.0);
}

#[test]
fn corridor_cost_matches_the_shortest_path() {
    let p = parse(LINE, &line_problem("c1", "c3")).unwrap();
    let row = run_batch_on(&p, "line", &config("hadd", 500), &PolicyRegistry::default()).unwrap();
    assert_eq!(row.success_rate, 1.0);
    let cost = row.avg_cost.unwrap();
    assert!((cost - 2.0).abs() <= 0.2, "mean cost {cost}");
}

#[test]
fn files_source_loads_domain_and_problem() {
    let dir = std::env::temp_dir().join(format!("cpomcp-harness-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let (d, q) = (dir.join("line-domain.pddl"), dir.join("line.pddl"));
    fs::write(&d, LINE).unwrap();
    fs::write(&q, line_problem("c0", "c3")).unwrap();
    let mut cfg = config("hadd-belief", 300);
    cfg.source = ProblemSource::Files { domain: d, problem: q };
    cfg.episodes = 3;
    let row = run_batch(&cfg, &PolicyRegistry::default()).unwrap();
    fs::remove_dir_all(&dir).ok();
    assert_eq!(row.success_rate, 1.0);
    assert_eq!(row.avg_cost, Some(3.0));
}

#[test]
fn reports_are_bit_identical_without_timing() {
    let mut cfg = config("hadd-belief", 200);
    cfg.episodes = 4;
    let registry = PolicyRegistry::default();
    let a = emit(&[run_batch(&cfg, &registry).unwrap()], Format::Json).unwrap();
    cfg.threads = 3;
    let b = emit(&[run_batch(&cfg, &registry).unwrap()], Format::Json).unwrap();
    assert_eq!(a, b);
}

#[test]
fn one_row_per_heuristic_in_order() {
    let p = parse(LINE, &line_problem("c1", "c3")).unwrap();
    let registry = PolicyRegistry::default();
    let mut cfg = config("random", 100);
    cfg.episodes = 2;
    let mut rows = Vec::new();
    for h in ["random", "hadd", "hadd-belief"] {
        cfg.search.policy = h.into();
        rows.push(run_batch_on(&p, "line", &cfg, &registry).unwrap());
    }
    let csv = emit(&rows, Format::Csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "instance,heuristic,simulations,success_rate,avg_cost,avg_step_secs");
    let order: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(order, ["random", "hadd", "hadd-belief"]);

    let back = parse_json(&emit(&rows, Format::Json).unwrap()).unwrap();
    assert_eq!(back, rows);
}

#[test]
fn aggregates_follow_the_episode_records() {
    let mut cfg = config("hadd", 150);
    cfg.source = ProblemSource::Instance("wumpus3".into());
    cfg.episodes = 6;
    cfg.step_limit = 8;
    let row = run_batch(&cfg, &PolicyRegistry::default()).unwrap();
    let wins: Vec<_> = row.episodes.iter().filter(|e| e.success).collect();
    assert_eq!(row.success_rate, wins.len() as f64 / 6.0);
    for (i, e) in row.episodes.iter().enumerate() {
        assert_eq!(e.seed, i as u64);
        assert!(e.steps <= 8);
    }
    let capped: f64 = row
        .episodes
        .iter()
        .map(|e| if e.success { e.cost as f64 } else { 8.0 })
        .sum::<f64>()
        / 6.0;
    assert!((row.cost_all_capped - capped).abs() < 1e-12);
    assert_eq!(row.avg_cost, row.cost_successes_only);
    let again = ResultRow::from_episodes(row.instance.clone(), row.heuristic.clone(), row.simulations, 8, row.episodes.clone());
    assert_eq!(again, row);
}

#[test]
fn bad_configurations_are_rejected() {
    let registry = PolicyRegistry::default();
    let mut cfg = config("ff", 10);
    assert!(matches!(run_batch(&cfg, &registry), Err(HarnessError::Config(_))));
    cfg.search.policy = "hadd".into();
    cfg.episodes = 0;
    assert!(matches!(run_batch(&cfg, &registry), Err(HarnessError::Config(_))));
    cfg.episodes = 1;
    cfg.source = ProblemSource::Instance("nosuch4".into());
    assert!(run_batch(&cfg, &registry).is_err());
}

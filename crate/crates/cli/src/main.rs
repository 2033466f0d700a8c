use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contingent_pomcp::domains::{generate, DomainSpec, Family};
use contingent_pomcp::harness::{
    emit, run_batch_on, write_report, ExperimentConfig, Format, HarnessError, ProblemSource, DEFAULT_STEP_LIMIT,
};
use contingent_pomcp::heuristics::PolicyRegistry;
use contingent_pomcp::pomcp::{Budget, SearchConfig};

#[derive(Parser)]
#[command(name = "cpomcp", version, about = "Online POMCP planning for stochastic contingent planning tasks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run online episodes on one problem and report the aggregates.
    Solve(SolveArgs),
    /// Write a generated benchmark instance as domain and problem files.
    Gen(GenArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Domain file (needs --problem).
    #[arg(long, requires = "problem", conflicts_with = "instance")]
    domain: Option<PathBuf>,
    /// Problem file (needs --domain).
    #[arg(long, requires = "domain")]
    problem: Option<PathBuf>,
    /// Built-in instance such as wumpus5 or doors7.
    #[arg(long, required_unless_present = "domain")]
    instance: Option<String>,
    /// Rollout heuristic; repeat or comma-separate for one row each.
    #[arg(long, value_delimiter = ',', default_value = "hadd-belief")]
    heuristic: Vec<String>,
    #[arg(long, default_value_t = 1500)]
    simulations: u32,
    /// Wall-clock budget per decision instead of a simulation count.
    #[arg(long)]
    timeout_ms: Option<u64>,
    #[arg(long, default_value_t = 20)]
    episodes: u32,
    /// Base seed; episode i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 30)]
    max_tree_depth: u32,
    #[arg(long, default_value_t = 70)]
    max_rollout_depth: u32,
    #[arg(long, default_value_t = 1.0)]
    exploration_c: f64,
    #[arg(long, default_value_t = 500)]
    particles: usize,
    #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
    step_limit: u32,
    /// Reject actions whose applicability only particles confirm.
    #[arg(long)]
    strict_applicability: bool,
    /// Rebuild the search tree after every step.
    #[arg(long)]
    fresh_tree: bool,
    /// Worker threads for episodes.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Skip timing so reports are bit-identical across runs.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
}

#[derive(Args)]
struct GenArgs {
    /// doors, blocks, unix, medpks, localize or wumpus.
    family: String,
    #[arg(long)]
    size: u32,
    /// Seed for randomized placements.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                HarnessError::Io { .. } | HarnessError::Json(_) | HarnessError::Csv(_) => ExitCode::FAILURE,
                _ => ExitCode::from(2),
            }
        }
    }
}

fn solve(a: SolveArgs) -> Result<(), HarnessError> {
    let source = match (a.instance, a.domain, a.problem) {
        (Some(name), _, _) => ProblemSource::Instance(name),
        (None, Some(domain), Some(problem)) => ProblemSource::Files { domain, problem },
        _ => return Err(HarnessError::Config("give --instance or both --domain and --problem".into())),
    };
    let format: Format = a.format.parse()?;
    let search = SearchConfig {
        budget: match a.timeout_ms {
            Some(ms) => Budget::TimeoutMs(ms),
            None => Budget::Simulations(a.simulations),
        },
        max_tree_depth: a.max_tree_depth,
        max_rollout_depth: a.max_rollout_depth,
        exploration_c: a.exploration_c,
        particles: a.particles,
        policy: String::new(),
        seed: a.seed,
        strict_applicability: a.strict_applicability,
        reuse_tree: !a.fresh_tree,
    };
    let mut cfg = ExperimentConfig::new(source, search);
    cfg.episodes = a.episodes;
    cfg.step_limit = a.step_limit;
    cfg.base_seed = a.seed;
    cfg.timing = !a.no_timing;
    cfg.threads = a.threads;

    let registry = PolicyRegistry::default();
    for h in &a.heuristic {
        cfg.search.policy = h.clone();
        cfg.validate(&registry)?;
    }
    let problem = cfg.source.load()?;
    let label = cfg.source.label();
    let mut rows = Vec::new();
    for h in &a.heuristic {
        cfg.search.policy = h.clone();
        let row = run_batch_on(&problem, &label, &cfg, &registry)?;
        eprintln!(
            "{} {}: success {:.0}%, avg cost {}, {:.4}s/step",
            row.instance,
            row.heuristic,
            row.success_rate * 100.0,
            row.avg_cost.map_or("-".to_string(), |c| format!("{c:.2}")),
            row.avg_step_secs
        );
        rows.push(row);
    }
    match a.out {
        Some(path) => write_report(&rows, format, &path),
        None => {
            print!("{}", emit(&rows, format)?);
            Ok(())
        }
    }
}

fn gen(a: GenArgs) -> Result<(), HarnessError> {
    let family: Family = a.family.parse()?;
    let mut spec = DomainSpec::new(family, a.size);
    spec.seed = a.seed;
    let inst = generate(&spec)?;
    inst.parse()?;
    let io = |path: PathBuf, r: std::io::Result<()>| r.map_err(|source| HarnessError::Io { path, source });
    io(a.out.clone(), fs::create_dir_all(&a.out))?;
    let domain = a.out.join(format!("{}-domain.pddl", inst.name));
    let problem = a.out.join(format!("{}.pddl", inst.name));
    io(domain.clone(), fs::write(&domain, &inst.domain))?;
    io(problem.clone(), fs::write(&problem, &inst.problem))?;
    println!("{}\n{}", domain.display(), problem.display());
    Ok(())
}

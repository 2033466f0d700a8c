//! Experiment batches: run online episodes for one instance and heuristic,
//! aggregate success rate, cost and decision time, and write reports.
//!
//! Mean cost is taken over successful episodes only; failed episodes run to
//! the step limit and would swamp the mean. The JSON report also carries the
//! mean over all episodes with failures counted at the step limit.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::thread;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::{self, DomainError, DomainSpec, Family};
use crate::heuristics::PolicyRegistry;
use crate::model::Problem;
use crate::parser::{self, ParseError};
use crate::pomcp::{run_episode_with, Budget, EpisodeRecord, PlannerError, SearchConfig};

/// Episode cutoff: longer runs count as stuck.
pub const DEFAULT_STEP_LIMIT: u32 = 100;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment: {0}")]
    Config(String),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("report serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("report serialization failed: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemSource {
    /// Catalog name (`wumpus5`) or any `<family><size>` name (`doors7`).
    Instance(String),
    Generated(DomainSpec),
    Files { domain: PathBuf, problem: PathBuf },
}

impl ProblemSource {
    pub fn label(&self) -> String {
        match self {
            ProblemSource::Instance(n) => n.clone(),
            ProblemSource::Generated(s) => s.name(),
            ProblemSource::Files { problem, .. } => problem
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| problem.display().to_string()),
        }
    }

    pub fn load(&self) -> Result<Problem, HarnessError> {
        match self {
            ProblemSource::Instance(n) => Ok(domains::build(&resolve_instance(n)?)?),
            ProblemSource::Generated(s) => Ok(domains::build(s)?),
            ProblemSource::Files { domain, problem } => {
                let read = |p: &Path| {
                    fs::read_to_string(p).map_err(|source| HarnessError::Io {
                        path: p.to_path_buf(),
                        source,
                    })
                };
                let (d, pr) = (read(domain)?, read(problem)?);
                parser::parse(&d, &pr).map_err(|source| HarnessError::Parse {
                    path: problem.clone(),
                    source,
                })
            }
        }
    }
}

/// Catalog names first, then `<family><size>`.
pub fn resolve_instance(name: &str) -> Result<DomainSpec, DomainError> {
    if let Ok(spec) = domains::instance(name) {
        return Ok(spec);
    }
    let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
    let (family, size) = name.split_at(split);
    let family = Family::from_str(family).map_err(|_| DomainError::UnknownInstance(name.to_string()))?;
    let size: u32 = size.parse().map_err(|_| DomainError::UnknownInstance(name.to_string()))?;
    let spec = DomainSpec::new(family, size);
    let range = family.sizes();
    if !range.contains(&size) {
        return Err(DomainError::UnsupportedSize {
            family,
            size,
            min: *range.start(),
            max: *range.end(),
        });
    }
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: ProblemSource,
    /// Search settings; `search.policy` names the rollout heuristic.
    pub search: SearchConfig,
    pub episodes: u32,
    pub step_limit: u32,
    /// Episode `i` uses seed `base_seed + i`.
    pub base_seed: u64,
    /// Measure decision time. Off gives bit-identical reports.
    pub timing: bool,
    /// Worker threads for independent episodes; 1 runs them in order.
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn new(source: ProblemSource, search: SearchConfig) -> Self {
        ExperimentConfig {
            source,
            search,
            episodes: 20,
            step_limit: DEFAULT_STEP_LIMIT,
            base_seed: 0,
            timing: true,
            threads: 1,
        }
    }

    pub fn validate(&self, registry: &PolicyRegistry) -> Result<(), HarnessError> {
        if self.episodes == 0 {
            return Err(HarnessError::Config("episode count must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(HarnessError::Config("thread count must be at least 1".into()));
        }
        if !registry.names().any(|n| n == self.search.policy) {
            let known: Vec<&str> = registry.names().collect();
            return Err(HarnessError::Config(format!(
                "unknown heuristic `{}` (known: {})",
                self.search.policy,
                known.join(", ")
            )));
        }
        self.search.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance: String,
    pub heuristic: String,
    /// `None` in wall-clock budget mode.
    pub simulations: Option<u32>,
    pub success_rate: f64,
    /// Mean cost over successful episodes; `None` when none succeeded.
    pub avg_cost: Option<f64>,
    pub avg_step_secs: f64,
    pub cost_successes_only: Option<f64>,
    /// Mean over all episodes, failures counted at the step limit.
    pub cost_all_capped: f64,
    pub step_limit: u32,
    pub episodes: Vec<EpisodeRecord>,
}

impl ResultRow {
    /// Aggregates the episode records.
    pub fn from_episodes(
        instance: String,
        heuristic: String,
        simulations: Option<u32>,
        step_limit: u32,
        episodes: Vec<EpisodeRecord>,
    ) -> Self {
        let n = episodes.len().max(1) as f64;
        let wins: Vec<&EpisodeRecord> = episodes.iter().filter(|e| e.success).collect();
        let avg_cost = (!wins.is_empty()).then(|| wins.iter().map(|e| e.cost as f64).sum::<f64>() / wins.len() as f64);
        let capped = episodes
            .iter()
            .map(|e| if e.success { e.cost as f64 } else { step_limit as f64 })
            .sum::<f64>()
            / n;
        let decisions: u32 = episodes.iter().map(|e| e.decisions).sum();
        let secs: f64 = episodes.iter().map(|e| e.search_secs).sum();
        ResultRow {
            instance,
            heuristic,
            simulations,
            success_rate: wins.len() as f64 / n,
            avg_cost,
            avg_step_secs: if decisions == 0 { 0.0 } else { secs / decisions as f64 },
            cost_successes_only: avg_cost,
            cost_all_capped: capped,
            step_limit,
            episodes,
        }
    }
}

/// Runs `cfg.episodes` online episodes and aggregates them.
pub fn run_batch(cfg: &ExperimentConfig, registry: &PolicyRegistry) -> Result<ResultRow, HarnessError> {
    cfg.validate(registry)?;
    let problem = cfg.source.load()?;
    run_batch_on(&problem, &cfg.source.label(), cfg, registry)
}

/// [`run_batch`] for an already loaded problem.
pub fn run_batch_on(
    problem: &Problem,
    label: &str,
    cfg: &ExperimentConfig,
    registry: &PolicyRegistry,
) -> Result<ResultRow, HarnessError> {
    cfg.validate(registry)?;
    let run = |i: u32| {
        run_episode_with(
            problem,
            &cfg.search,
            registry,
            cfg.base_seed.wrapping_add(i as u64),
            cfg.step_limit,
            cfg.timing,
        )
    };
    let episodes: Vec<EpisodeRecord> = if cfg.threads <= 1 {
        (0..cfg.episodes).map(run).collect()
    } else {
        let workers = cfg.threads.min(cfg.episodes as usize) as u32;
        let mut chunks: Vec<Vec<(u32, EpisodeRecord)>> = thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let run = &run;
                    scope.spawn(move || {
                        (w..cfg.episodes)
                            .step_by(workers as usize)
                            .map(|i| (i, run(i)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("episode worker panicked")).collect()
        });
        let mut all: Vec<(u32, EpisodeRecord)> = chunks.drain(..).flatten().collect();
        all.sort_by_key(|(i, _)| *i);
        all.into_iter().map(|(_, r)| r).collect()
    };
    let simulations = match cfg.search.budget {
        Budget::Simulations(n) => Some(n),
        Budget::TimeoutMs(_) => None,
    };
    Ok(ResultRow::from_episodes(
        label.to_string(),
        cfg.search.policy.clone(),
        simulations,
        cfg.step_limit,
        episodes,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(HarnessError::Config(format!("unknown format `{s}` (csv or json)"))),
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    instance: &'a str,
    heuristic: &'a str,
    simulations: Option<u32>,
    success_rate: f64,
    avg_cost: Option<f64>,
    avg_step_secs: f64,
}

/// CSV carries the aggregates only; JSON adds the episode records.
pub fn emit(rows: &[ResultRow], format: Format) -> Result<String, HarnessError> {
    if rows.is_empty() {
        return Err(HarnessError::Config("nothing to report".into()));
    }
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(CsvRow {
                    instance: &r.instance,
                    heuristic: &r.heuristic,
                    simulations: r.simulations,
                    success_rate: r.success_rate,
                    avg_cost: r.avg_cost,
                    avg_step_secs: r.avg_step_secs,
                })?;
            }
            let bytes = w.into_inner().map_err(|e| HarnessError::Csv(e.into_error().into()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

pub fn parse_json(text: &str) -> Result<Vec<ResultRow>, HarnessError> {
    Ok(serde_json::from_str(text)?)
}

pub fn write_report(rows: &[ResultRow], format: Format, path: &Path) -> Result<(), HarnessError> {
    let text = emit(rows, format)?;
    fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(seed: u64, success: bool, cost: u32) -> EpisodeRecord {
        EpisodeRecord {
            seed,
            success,
            cost,
            steps: cost,
            search_secs: 0.5,
            decisions: cost,
            error: None,
        }
    }

    fn row() -> ResultRow {
        ResultRow::from_episodes(
            "doors5".into(),
            "hadd".into(),
            Some(500),
            100,
            vec![record(0, true, 10), record(1, false, 100), record(2, true, 14)],
        )
    }

    #[test]
    fn aggregates_follow_the_records() {
        let r = row();
        assert!((r.success_rate - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.avg_cost, Some(12.0));
        assert_eq!(r.cost_successes_only, Some(12.0));
        assert!((r.cost_all_capped - 124.0 / 3.0).abs() < 1e-12);
        assert!((r.avg_step_secs - 1.5 / 124.0).abs() < 1e-12);
        let none = ResultRow::from_episodes("x".into(), "random".into(), None, 100, vec![record(0, false, 100)]);
        assert_eq!(none.avg_cost, None);
        assert_eq!(none.success_rate, 0.0);
    }

    #[test]
    fn csv_has_header_and_one_line_per_row() {
        let text = emit(&[row()], Format::Csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "instance,heuristic,simulations,success_rate,avg_cost,avg_step_secs");
        assert!(lines[1].starts_with("doors5,hadd,500,0.666"));
    }

    #[test]
    fn json_round_trips() {
        let rows = vec![row(), ResultRow::from_episodes("x".into(), "random".into(), None, 100, vec![record(0, false, 100)])];
        let text = emit(&rows, Format::Json).unwrap();
        assert_eq!(parse_json(&text).unwrap(), rows);
    }

    #[test]
    fn empty_report_is_an_error() {
        assert!(matches!(emit(&[], Format::Csv), Err(HarnessError::Config(_))));
    }

    #[test]
    fn instance_names_resolve() {
        assert_eq!(resolve_instance("wumpus5").unwrap(), DomainSpec::new(Family::Wumpus, 5));
        assert_eq!(resolve_instance("doors7").unwrap(), DomainSpec::new(Family::Doors, 7));
        assert!(matches!(resolve_instance("wumpus55"), Err(DomainError::UnsupportedSize { .. })));
        assert!(matches!(resolve_instance("maze3"), Err(DomainError::UnknownInstance(_))));
    }

    #[test]
    fn config_errors_are_reported() {
        let reg = PolicyRegistry::default();
        let mut cfg = ExperimentConfig::new(ProblemSource::Instance("medpks2".into()), SearchConfig::default());
        cfg.episodes = 0;
        assert!(matches!(run_batch(&cfg, &reg), Err(HarnessError::Config(_))));
        cfg.episodes = 1;
        cfg.search.policy = "ff".into();
        let e = run_batch(&cfg, &reg).unwrap_err();
        assert!(e.to_string().contains("unknown heuristic `ff`"), "{e}");
    }

    #[test]
    fn missing_file_names_the_path() {
        let src = ProblemSource::Files {
            domain: "/nonexistent/d.pddl".into(),
            problem: "/nonexistent/p.pddl".into(),
        };
        let e = src.load().unwrap_err();
        assert!(e.to_string().starts_with("/nonexistent/d.pddl: "), "{e}");
    }
}

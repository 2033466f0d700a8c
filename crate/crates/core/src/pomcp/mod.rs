//! POMCP over action-observation histories with min-cost backups and
//! heuristic rollouts.

mod episode;
mod search;
mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::BeliefError;
use crate::heuristics::HeuristicError;
use crate::model::ModelError;

pub use episode::{run_episode, run_episode_with, EpisodeRecord};
pub use search::{ActionStats, Planner, SearchResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlannerError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("no applicable action at the root")]
    NoApplicableAction,
    #[error("the root belief is already a goal belief")]
    GoalAtRoot,
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Simulations(u32),
    TimeoutMs(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub budget: Budget,
    pub max_tree_depth: u32,
    pub max_rollout_depth: u32,
    pub exploration_c: f64,
    /// Particle target for the root pool.
    pub particles: usize,
    pub policy: String,
    pub seed: u64,
    /// Reject actions whose applicability can only be confirmed by particles.
    pub strict_applicability: bool,
    /// Keep the executed branch of the tree as the next root.
    pub reuse_tree: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: Budget::Simulations(1500),
            max_tree_depth: 30,
            max_rollout_depth: 70,
            exploration_c: 1.0,
            particles: 500,
            policy: "hadd-belief".into(),
            seed: 0,
            strict_applicability: false,
            reuse_tree: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), PlannerError> {
        let bad = |m: &str| Err(PlannerError::InvalidConfig(m.to_string()));
        if self.max_tree_depth < 1 {
            return bad("max tree depth must be at least 1");
        }
        if !(self.exploration_c >= 0.0 && self.exploration_c.is_finite()) {
            return bad("exploration constant must be a finite number >= 0");
        }
        if self.particles == 0 {
            return bad("particle target must be at least 1");
        }
        match self.budget {
            Budget::Simulations(0) => bad("simulation count must be at least 1"),
            Budget::TimeoutMs(0) => bad("timeout must be at least 1 ms"),
            _ => Ok(()),
        }
    }
}

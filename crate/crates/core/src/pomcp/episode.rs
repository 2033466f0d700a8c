use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::BeliefContext;
use crate::heuristics::PolicyRegistry;
use crate::model::Problem;

use super::{Planner, PlannerError, SearchConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub success: bool,
    /// Actions executed.
    pub cost: u32,
    pub steps: u32,
    /// Wall-clock seconds spent in search, summed over decisions (0 when
    /// timing is off).
    pub search_secs: f64,
    pub decisions: u32,
    pub error: Option<String>,
}

impl EpisodeRecord {
    pub fn mean_step_secs(&self) -> f64 {
        if self.decisions == 0 {
            0.0
        } else {
            self.search_secs / self.decisions as f64
        }
    }
}

/// One online episode with the built-in policies and timing on.
pub fn run_episode(p: &Problem, cfg: &SearchConfig, seed: u64, step_limit: u32) -> EpisodeRecord {
    run_episode_with(p, cfg, &PolicyRegistry::default(), seed, step_limit, true)
}

/// Samples a hidden true state, then alternates search and execution until
/// the belief is a goal belief or `step_limit` actions were executed.
/// Planner errors end the episode as a failure carrying the message.
pub fn run_episode_with(
    p: &Problem,
    cfg: &SearchConfig,
    registry: &PolicyRegistry,
    seed: u64,
    step_limit: u32,
    timing: bool,
) -> EpisodeRecord {
    let mut rec = EpisodeRecord {
        seed,
        success: false,
        cost: 0,
        steps: 0,
        search_secs: 0.0,
        decisions: 0,
        error: None,
    };
    if let Err(e) = episode(p, cfg, registry, seed, step_limit, timing, &mut rec) {
        rec.success = false;
        rec.error = Some(e.to_string());
    }
    rec
}

fn episode(
    p: &Problem,
    cfg: &SearchConfig,
    registry: &PolicyRegistry,
    seed: u64,
    step_limit: u32,
    timing: bool,
    rec: &mut EpisodeRecord,
) -> Result<(), PlannerError> {
    let mut env_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut state = BeliefContext::new(p)?.sample_initial(&mut env_rng)?;
    let mut planner = Planner::with_registry(p, cfg.clone(), registry, &mut rng)?;
    loop {
        if planner.at_goal()? {
            rec.success = p.is_goal(&state);
            if !rec.success {
                rec.error = Some("the belief claims the goal but the true state is not a goal state".into());
            }
            return Ok(());
        }
        if rec.steps >= step_limit {
            return Ok(());
        }
        let start = timing.then(Instant::now);
        let result = planner.search(&mut rng)?;
        if let Some(t) = start {
            rec.search_secs += t.elapsed().as_secs_f64();
        }
        rec.decisions += 1;
        let (next, obs) = p.step(p.action(result.action), &state, &mut env_rng)?;
        state = next;
        rec.steps += 1;
        rec.cost += 1;
        planner.advance(result.action, obs, &mut rng)?;
    }
}

//! Rollout policies and the name registry the harness selects them from.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use crate::bitset::BitSet;
use crate::model::{ActionId, Problem, State};

use super::belief::BeliefScratch;
use super::relaxed::{HeuristicError, HeuristicValue, RelaxedTask, SingleScratch};

/// Probability that the single-state policy picks a sensing action when both
/// kinds are available.
pub const SENSE_EPSILON: f64 = 0.1;

/// Caller-owned buffers shared by all built-in policies.
#[derive(Debug, Default)]
pub struct PolicyScratch {
    pub single: SingleScratch,
    pub belief: BeliefScratch,
    applicable: Vec<ActionId>,
    best: Vec<ActionId>,
    inits: Vec<BitSet>,
}

pub trait RolloutPolicy: Send + Sync {
    fn name(&self) -> &str;

    /// Next rollout action from true state `s` under particle set `belief`
    /// (which contains `s`). `None` signals a dead end.
    fn choose(
        &self,
        p: &Problem,
        s: &State,
        belief: &[State],
        rng: &mut dyn RngCore,
        scratch: &mut PolicyScratch,
    ) -> Option<ActionId>;
}

/// Actions whose precondition holds in `s` and in every state of `belief`.
pub fn jointly_applicable(p: &Problem, s: &State, belief: &[State], out: &mut Vec<ActionId>) {
    out.clear();
    for id in p.action_ids() {
        let a = p.action(id);
        if a.pre.holds(s) && belief.iter().all(|b| a.pre.holds(b)) {
            out.push(id);
        }
    }
}

fn pick_min(scored: impl Iterator<Item = (ActionId, HeuristicValue)>, best: &mut Vec<ActionId>) -> HeuristicValue {
    best.clear();
    let mut min = HeuristicValue::DEAD_END;
    for (a, h) in scored {
        if h < min {
            min = h;
            best.clear();
        }
        if h == min {
            best.push(a);
        }
    }
    min
}

#[derive(Debug, Default)]
pub struct RandomPolicy;

impl RolloutPolicy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn choose(
        &self,
        p: &Problem,
        s: &State,
        belief: &[State],
        rng: &mut dyn RngCore,
        sc: &mut PolicyScratch,
    ) -> Option<ActionId> {
        jointly_applicable(p, s, belief, &mut sc.applicable);
        sc.applicable.choose(rng).copied()
    }
}

#[derive(Debug)]
pub struct HaddPolicy {
    task: Arc<RelaxedTask>,
}

impl HaddPolicy {
    pub fn new(p: &Problem) -> Result<Self, HeuristicError> {
        Ok(HaddPolicy {
            task: Arc::new(RelaxedTask::new(p)?),
        })
    }
}

impl RolloutPolicy for HaddPolicy {
    fn name(&self) -> &str {
        "hadd"
    }

    fn choose(
        &self,
        p: &Problem,
        s: &State,
        belief: &[State],
        rng: &mut dyn RngCore,
        sc: &mut PolicyScratch,
    ) -> Option<ActionId> {
        jointly_applicable(p, s, belief, &mut sc.applicable);
        let (mut sensing, mut acting) = (Vec::new(), Vec::new());
        for &a in &sc.applicable {
            if p.action(a).actuates() {
                acting.push(a);
            } else {
                sensing.push(a);
            }
        }
        if acting.is_empty() || (!sensing.is_empty() && rng.gen::<f64>() < SENSE_EPSILON) {
            return sensing.choose(rng).copied();
        }
        let task = &self.task;
        let single = &mut sc.single;
        let min = pick_min(
            acting.iter().map(|&a| {
                let init = task.relaxed_apply(p, a, s);
                (a, task.hadd_relaxed(&init, single))
            }),
            &mut sc.best,
        );
        if min.is_dead_end() {
            return None;
        }
        sc.best.choose(rng).copied()
    }
}

#[derive(Debug)]
pub struct HaddBeliefPolicy {
    task: Arc<RelaxedTask>,
}

impl HaddBeliefPolicy {
    pub fn new(p: &Problem) -> Result<Self, HeuristicError> {
        Ok(HaddBeliefPolicy {
            task: Arc::new(RelaxedTask::new(p)?),
        })
    }
}

impl RolloutPolicy for HaddBeliefPolicy {
    fn name(&self) -> &str {
        "hadd-belief"
    }

    fn choose(
        &self,
        p: &Problem,
        s: &State,
        belief: &[State],
        rng: &mut dyn RngCore,
        sc: &mut PolicyScratch,
    ) -> Option<ActionId> {
        jointly_applicable(p, s, belief, &mut sc.applicable);
        if sc.applicable.is_empty() {
            return None;
        }
        let task = &self.task;
        let others: Vec<&State> = belief.iter().filter(|b| *b != s).collect();

        let mut current: Option<HeuristicValue> = None;
        let mut scores = Vec::with_capacity(sc.applicable.len());
        for &a in &sc.applicable {
            let action = p.action(a);
            let h = if action.actuates() {
                sc.inits.clear();
                sc.inits.push(task.relaxed_apply(p, a, s));
                for o in &others {
                    sc.inits.push(task.relaxed_apply(p, a, o));
                }
                task.hadd_belief_relaxed(&sc.inits, &mut sc.belief)
            } else {
                let base = *current.get_or_insert_with(|| {
                    sc.inits.clear();
                    sc.inits.push(task.relaxed_state(s));
                    for o in &others {
                        sc.inits.push(task.relaxed_state(o));
                    }
                    task.hadd_belief_relaxed(&sc.inits, &mut sc.belief)
                });
                let informative = others
                    .iter()
                    .any(|o| action.observes.iter().any(|&f| o.get(f) != s.get(f)));
                match base.value() {
                    Some(v) if informative && v > 0 => HeuristicValue::finite(v - 1),
                    _ => base,
                }
            };
            scores.push((a, h));
        }
        let min = pick_min(scores.into_iter(), &mut sc.best);
        if min.is_dead_end() {
            return None;
        }
        sc.best.choose(rng).copied()
    }
}

pub type PolicyFactory = Arc<dyn Fn(&Problem) -> Result<Box<dyn RolloutPolicy>, HeuristicError> + Send + Sync>;

/// Rollout policies by name. Starts with "random", "hadd" and "hadd-belief".
#[derive(Clone)]
pub struct PolicyRegistry {
    entries: Vec<(String, PolicyFactory)>,
}

impl Default for PolicyRegistry {
    fn default() -> Self {
        let mut r = PolicyRegistry { entries: Vec::new() };
        r.register("random", Arc::new(|_| Ok(Box::new(RandomPolicy) as Box<dyn RolloutPolicy>)));
        r.register("hadd", Arc::new(|p| Ok(Box::new(HaddPolicy::new(p)?) as Box<dyn RolloutPolicy>)));
        r.register(
            "hadd-belief",
            Arc::new(|p| Ok(Box::new(HaddBeliefPolicy::new(p)?) as Box<dyn RolloutPolicy>)),
        );
        r
    }
}

impl PolicyRegistry {
    /// Adds or replaces a policy.
    pub fn register(&mut self, name: &str, factory: PolicyFactory) {
        self.entries.retain(|(n, _)| n != name);
        self.entries.push((name.to_string(), factory));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn build(&self, name: &str, p: &Problem) -> Result<Box<dyn RolloutPolicy>, HeuristicError> {
        let (_, f) = self
            .entries
            .iter()
            .find(|(n, _)| n == name)
            .ok_or_else(|| HeuristicError::UnknownPolicy(name.to_string()))?;
        f(p)
    }
}

/// Builds a built-in policy by name.
pub fn policy_by_name(name: &str, p: &Problem) -> Result<Box<dyn RolloutPolicy>, HeuristicError> {
    PolicyRegistry::default().build(name, p)
}

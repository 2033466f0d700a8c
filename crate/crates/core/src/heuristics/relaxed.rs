//! Delete-relaxed compilation of a problem and layered graph evaluation.
//!
//! Facts that some precondition, effect condition or goal reads negatively
//! get a complement fact `not-f`, so every relaxed precondition is a set of
//! positive relaxed facts. An action is split into units, one per conditional
//! effect and disjunct of its condition; a unit adds the literals of every
//! option of its effect (probability relaxation).

use std::fmt;

use thiserror::Error;

use crate::bitset::BitSet;
use crate::model::{ActionId, FactId, Formula, Literal, Problem, State};

/// Bound on disjuncts when a precondition or condition is put in DNF.
const DNF_LIMIT: usize = 64;

pub(crate) const UNREACHED: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeuristicError {
    #[error("formula of `{0}` has too many disjuncts for the relaxation")]
    FormulaTooComplex(String),
    #[error("unknown rollout policy `{0}`")]
    UnknownPolicy(String),
}

/// Heuristic estimate: a layer-depth sum or the dead-end sentinel, which
/// orders above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeuristicValue(u32);

impl HeuristicValue {
    pub const DEAD_END: HeuristicValue = HeuristicValue(u32::MAX);

    pub fn finite(v: u32) -> Self {
        debug_assert!(v != u32::MAX);
        HeuristicValue(v)
    }

    pub fn is_dead_end(self) -> bool {
        self == Self::DEAD_END
    }

    pub fn value(self) -> Option<u32> {
        if self.is_dead_end() {
            None
        } else {
            Some(self.0)
        }
    }
}

impl fmt::Display for HeuristicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "dead-end"),
        }
    }
}

/// Compressed adjacency lists.
#[derive(Debug, Clone, Default)]
pub(crate) struct Csr {
    offsets: Vec<u32>,
    data: Vec<u32>,
}

impl Csr {
    fn from_lists(lists: &[Vec<u32>]) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut data = Vec::new();
        offsets.push(0);
        for l in lists {
            data.extend_from_slice(l);
            offsets.push(data.len() as u32);
        }
        Csr { offsets, data }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> &[u32] {
        &self.data[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }
}

#[derive(Debug, Clone)]
pub struct RelaxedTask {
    num_facts: usize,
    num_relaxed: usize,
    /// Relaxed id of `not-f`, if `f` has a complement.
    complement: Vec<u32>,
    /// Per precondition disjunct: owning action and size.
    pub(crate) disj_action: Vec<u32>,
    pub(crate) disj_size: Vec<u32>,
    /// Per unit: owning action, condition size, added relaxed facts.
    pub(crate) unit_action: Vec<u32>,
    pub(crate) unit_size: Vec<u32>,
    pub(crate) unit_adds: Csr,
    /// Per action: its units.
    pub(crate) action_units: Csr,
    /// Per relaxed fact: disjuncts and units that read it.
    pub(crate) disj_watch: Csr,
    pub(crate) unit_watch: Csr,
    /// Per action: observed facts (empty for pure actuation).
    pub(crate) observes: Csr,
    /// Goal in DNF over relaxed facts.
    pub(crate) goal_terms: Vec<Vec<u32>>,
    num_actions: usize,
}

fn dnf_of(f: &Formula, what: &str) -> Result<Vec<Vec<Literal>>, HeuristicError> {
    f.dnf(DNF_LIMIT)
        .ok_or_else(|| HeuristicError::FormulaTooComplex(what.to_string()))
}

impl RelaxedTask {
    pub fn new(p: &Problem) -> Result<Self, HeuristicError> {
        let n = p.num_facts();
        let mut pre_dnf = Vec::with_capacity(p.actions().len());
        let mut cond_dnf = Vec::with_capacity(p.actions().len());
        let mut negated = vec![false; n];
        let mut mark = |terms: &Vec<Vec<Literal>>| {
            for t in terms {
                for l in t {
                    if !l.positive {
                        negated[l.fact.index()] = true;
                    }
                }
            }
        };
        for a in p.actions() {
            let d = dnf_of(a.pre.formula(), &a.name)?;
            mark(&d);
            pre_dnf.push(d);
            let mut conds = Vec::new();
            if a.actuates() {
                for e in &a.effects {
                    let c = dnf_of(e.condition.formula(), &a.name)?;
                    mark(&c);
                    conds.push(c);
                }
            }
            cond_dnf.push(conds);
        }
        let goal_dnf = dnf_of(p.goal.formula(), "goal")?;
        mark(&goal_dnf);

        let mut complement = vec![UNREACHED; n];
        let mut next = n as u32;
        for f in 0..n {
            if negated[f] {
                complement[f] = next;
                next += 1;
            }
        }
        let num_relaxed = next as usize;
        let relax = |l: Literal| -> Option<u32> {
            if l.positive {
                Some(l.fact.0)
            } else {
                let c = complement[l.fact.index()];
                (c != UNREACHED).then_some(c)
            }
        };
        let relax_term = |t: &[Literal]| -> Vec<u32> {
            let mut v: Vec<u32> = t.iter().filter_map(|&l| relax(l)).collect();
            v.sort_unstable();
            v.dedup();
            v
        };

        let mut disj_action = Vec::new();
        let mut disj_size = Vec::new();
        let mut disj_watch = vec![Vec::new(); num_relaxed];
        let mut unit_action = Vec::new();
        let mut unit_size = Vec::new();
        let mut unit_adds = Vec::new();
        let mut unit_watch = vec![Vec::new(); num_relaxed];
        let mut action_units = Vec::new();
        let mut observes = Vec::new();
        for (ai, a) in p.actions().iter().enumerate() {
            for t in &pre_dnf[ai] {
                let facts = relax_term(t);
                let id = disj_action.len() as u32;
                for &f in &facts {
                    disj_watch[f as usize].push(id);
                }
                disj_action.push(ai as u32);
                disj_size.push(facts.len() as u32);
            }
            let mut units = Vec::new();
            for (ei, e) in a.effects.iter().enumerate().filter(|_| a.actuates()) {
                let mut adds: Vec<u32> = e
                    .outcome
                    .options
                    .iter()
                    .flat_map(|o| o.literals.iter().filter_map(|&l| relax(l)))
                    .collect();
                adds.sort_unstable();
                adds.dedup();
                if adds.is_empty() {
                    continue;
                }
                for t in &cond_dnf[ai][ei] {
                    let facts = relax_term(t);
                    let id = unit_action.len() as u32;
                    for &f in &facts {
                        unit_watch[f as usize].push(id);
                    }
                    unit_action.push(ai as u32);
                    unit_size.push(facts.len() as u32);
                    unit_adds.push(adds.clone());
                    units.push(id);
                }
            }
            action_units.push(units);
            observes.push(a.observes.iter().map(|f| f.0).collect::<Vec<u32>>());
        }
        let goal_terms = goal_dnf.iter().map(|t| relax_term(t)).collect();
        Ok(RelaxedTask {
            num_facts: n,
            num_relaxed,
            complement,
            disj_action,
            disj_size,
            unit_action,
            unit_size,
            unit_adds: Csr::from_lists(&unit_adds),
            action_units: Csr::from_lists(&action_units),
            disj_watch: Csr::from_lists(&disj_watch),
            unit_watch: Csr::from_lists(&unit_watch),
            observes: Csr::from_lists(&observes),
            goal_terms,
            num_actions: p.actions().len(),
        })
    }

    pub fn num_relaxed_facts(&self) -> usize {
        self.num_relaxed
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    /// Relaxed id of a literal, if it is represented.
    pub fn relaxed_literal(&self, l: Literal) -> Option<u32> {
        if l.positive {
            Some(l.fact.0)
        } else {
            let c = self.complement[l.fact.index()];
            (c != UNREACHED).then_some(c)
        }
    }

    /// Relaxed facts holding in a concrete state.
    pub fn relaxed_state(&self, s: &State) -> BitSet {
        let mut b = BitSet::new(self.num_relaxed);
        for f in 0..self.num_facts {
            if s.get(FactId(f as u32)) {
                b.insert(f);
            } else if self.complement[f] != UNREACHED {
                b.insert(self.complement[f] as usize);
            }
        }
        b
    }

    /// Relaxed successor: the facts of `s` plus every option's literals of
    /// every effect of `a` whose condition holds in `s`.
    pub fn relaxed_apply(&self, p: &Problem, a: ActionId, s: &State) -> BitSet {
        let mut b = self.relaxed_state(s);
        self.add_relaxed_effects(p, a, s, &mut b);
        b
    }

    pub(crate) fn add_relaxed_effects(&self, p: &Problem, a: ActionId, s: &State, b: &mut BitSet) {
        let action = p.action(a);
        if !action.actuates() {
            return;
        }
        for e in &action.effects {
            if e.condition.holds(s) {
                for o in &e.outcome.options {
                    for &l in &o.literals {
                        if let Some(r) = self.relaxed_literal(l) {
                            b.insert(r as usize);
                        }
                    }
                }
            }
        }
    }

    /// Full layered graph from a relaxed fact set (allocating; for inspection).
    pub fn graph(&self, init: &BitSet) -> PlanningGraph {
        let mut scratch = SingleScratch::default();
        self.run_single(init, &mut scratch, false);
        PlanningGraph {
            depth: scratch.depth.clone(),
            layers: scratch.layers,
            goal_terms: self.goal_terms.clone(),
        }
    }

    pub fn graph_of_state(&self, s: &State) -> PlanningGraph {
        self.graph(&self.relaxed_state(s))
    }

    /// Single-state h_add from a relaxed fact set.
    pub fn hadd_relaxed(&self, init: &BitSet, scratch: &mut SingleScratch) -> HeuristicValue {
        self.run_single(init, scratch, true);
        goal_sum(&self.goal_terms, &scratch.depth)
    }

    pub fn hadd_single(&self, s: &State, scratch: &mut SingleScratch) -> HeuristicValue {
        let init = self.relaxed_state(s);
        self.hadd_relaxed(&init, scratch)
    }

    /// Layered fixpoint. Depth of a relaxed fact = index of the first layer
    /// containing it. An action joins the first layer where one of its
    /// precondition disjuncts holds in the previous fact layer; each unit
    /// fires in the first layer where its action is in and its condition holds.
    fn run_single(&self, init: &BitSet, sc: &mut SingleScratch, stop_at_goal: bool) {
        sc.reset(self);
        for f in init.iter() {
            sc.depth[f] = 0;
            sc.frontier.push(f as u32);
        }
        let mut goal_missing = if stop_at_goal && self.goal_terms.len() == 1 {
            self.goal_terms[0].iter().filter(|&&f| sc.depth[f as usize] != 0).count()
        } else {
            usize::MAX
        };
        // Actions and units with empty requirement lists.
        for (d, &size) in self.disj_size.iter().enumerate() {
            if size == 0 {
                let a = self.disj_action[d] as usize;
                if !sc.enabled[a] {
                    sc.enabled[a] = true;
                    sc.newly_enabled.push(a as u32);
                }
            }
        }
        let mut layer = 0u32;
        loop {
            if goal_missing == 0 {
                break;
            }
            layer += 1;
            debug_assert!(layer as usize <= self.num_relaxed + 1, "relaxed graph exceeded its fixpoint bound");
            for &f in &sc.frontier {
                for &d in self.disj_watch.get(f as usize) {
                    let c = &mut sc.disj_cnt[d as usize];
                    *c -= 1;
                    if *c == 0 {
                        let a = self.disj_action[d as usize] as usize;
                        if !sc.enabled[a] {
                            sc.enabled[a] = true;
                            sc.newly_enabled.push(a as u32);
                        }
                    }
                }
                for &u in self.unit_watch.get(f as usize) {
                    let c = &mut sc.unit_cnt[u as usize];
                    *c -= 1;
                    if *c == 0 && sc.enabled[self.unit_action[u as usize] as usize] {
                        sc.ready.push(u);
                    }
                }
            }
            for &a in &sc.newly_enabled {
                for &u in self.action_units.get(a as usize) {
                    if sc.unit_cnt[u as usize] == 0 {
                        sc.ready.push(u);
                    }
                }
            }
            sc.newly_enabled.clear();
            sc.frontier.clear();
            for &u in &sc.ready {
                if sc.fired[u as usize] {
                    continue;
                }
                sc.fired[u as usize] = true;
                for &f in self.unit_adds.get(u as usize) {
                    if sc.depth[f as usize] == UNREACHED {
                        sc.depth[f as usize] = layer;
                        sc.frontier.push(f);
                        if goal_missing != usize::MAX && self.goal_terms[0].binary_search(&f).is_ok() {
                            goal_missing -= 1;
                        }
                    }
                }
            }
            sc.ready.clear();
            if sc.frontier.is_empty() {
                break;
            }
        }
        sc.layers = layer;
    }
}

pub(crate) fn goal_sum(goal_terms: &[Vec<u32>], depth: &[u32]) -> HeuristicValue {
    let mut best = HeuristicValue::DEAD_END;
    for t in goal_terms {
        let mut sum = 0u32;
        let mut ok = true;
        for &f in t {
            let d = depth[f as usize];
            if d == UNREACHED {
                ok = false;
                break;
            }
            sum += d;
        }
        if ok && HeuristicValue::finite(sum) < best {
            best = HeuristicValue::finite(sum);
        }
    }
    best
}

/// Reusable buffers for single-state evaluation.
#[derive(Debug, Clone, Default)]
pub struct SingleScratch {
    pub(crate) depth: Vec<u32>,
    disj_cnt: Vec<u32>,
    unit_cnt: Vec<u32>,
    enabled: Vec<bool>,
    fired: Vec<bool>,
    frontier: Vec<u32>,
    newly_enabled: Vec<u32>,
    ready: Vec<u32>,
    layers: u32,
}

impl SingleScratch {
    fn reset(&mut self, t: &RelaxedTask) {
        self.depth.clear();
        self.depth.resize(t.num_relaxed, UNREACHED);
        self.disj_cnt.clear();
        self.disj_cnt.extend_from_slice(&t.disj_size);
        self.unit_cnt.clear();
        self.unit_cnt.extend_from_slice(&t.unit_size);
        self.enabled.clear();
        self.enabled.resize(t.num_actions, false);
        self.fired.clear();
        self.fired.resize(t.unit_size.len(), false);
        self.frontier.clear();
        self.newly_enabled.clear();
        self.ready.clear();
        // Units without a condition are ready as soon as their action is in.
        self.layers = 0;
    }
}

/// First-appearance depths of a layered relaxed graph.
#[derive(Debug, Clone)]
pub struct PlanningGraph {
    depth: Vec<u32>,
    layers: u32,
    goal_terms: Vec<Vec<u32>>,
}

impl PlanningGraph {
    /// Depth of a relaxed fact, `None` if never reached.
    pub fn depth(&self, relaxed_fact: u32) -> Option<u32> {
        let d = self.depth[relaxed_fact as usize];
        (d != UNREACHED).then_some(d)
    }

    pub fn num_layers(&self) -> u32 {
        self.layers
    }

    pub fn hadd(&self) -> HeuristicValue {
        goal_sum(&self.goal_terms, &self.depth)
    }

    /// Deepest goal fact of the best goal term; test probe only.
    pub fn hmax(&self) -> HeuristicValue {
        let mut best = HeuristicValue::DEAD_END;
        for t in &self.goal_terms {
            let mut m = 0;
            let mut ok = true;
            for &f in t {
                let d = self.depth[f as usize];
                if d == UNREACHED {
                    ok = false;
                    break;
                }
                m = m.max(d);
            }
            if ok && HeuristicValue::finite(m) < best {
                best = HeuristicValue::finite(m);
            }
        }
        best
    }
}

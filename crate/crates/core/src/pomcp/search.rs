use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::belief::{BeliefContext, BeliefError, History, HistoryStep, Knowledge, REJECTION_BUDGET};
use crate::heuristics::{PolicyRegistry, PolicyScratch, RolloutPolicy};
use crate::model::{Action, ActionId, ActionKind, Formula, Observation, Problem, State};

use super::tree::{edge_backup, Edge, GoalStatus, Node, NodeId, Tree, NO_PARENT};
use super::{Budget, PlannerError, SearchConfig};

/// Particles a new node inherits from its parent.
const INHERITED_PARTICLES: usize = 16;
/// Particles kept at a non-root node.
const NODE_PARTICLE_CAP: usize = 64;
/// States passed to the rollout policy besides the simulated one.
const ROLLOUT_BELIEF_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionStats {
    pub action: ActionId,
    pub count: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub action: ActionId,
    pub root_value: f64,
    pub simulations: u32,
    pub actions: Vec<ActionStats>,
}

/// Online planner state for one episode: the executed history, the root
/// particle pool and the search tree.
pub struct Planner<'p> {
    ctx: BeliefContext<'p>,
    cfg: SearchConfig,
    policy: Box<dyn RolloutPolicy>,
    scratch: PolicyScratch,
    history: History,
    pool: Vec<State>,
    tree: Tree,
}

impl<'p> Planner<'p> {
    pub fn new<R: RngCore>(problem: &'p Problem, cfg: SearchConfig, rng: &mut R) -> Result<Self, PlannerError> {
        Self::with_registry(problem, cfg, &PolicyRegistry::default(), rng)
    }

    pub fn with_registry<R: RngCore>(
        problem: &'p Problem,
        cfg: SearchConfig,
        registry: &PolicyRegistry,
        rng: &mut R,
    ) -> Result<Self, PlannerError> {
        cfg.validate()?;
        let ctx = BeliefContext::new(problem)?;
        let policy = registry.build(&cfg.policy, problem)?;
        let history = History::new(problem);
        let pool = ctx.particles(&history, cfg.particles, rng)?;
        let mut planner = Planner {
            ctx,
            cfg,
            policy,
            scratch: PolicyScratch::default(),
            history,
            pool,
            tree: Tree::default(),
        };
        planner.fresh_tree();
        Ok(planner)
    }

    pub fn problem(&self) -> &'p Problem {
        self.ctx.problem()
    }

    pub fn config(&self) -> &SearchConfig {
        &self.cfg
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn particles(&self) -> &[State] {
        &self.pool
    }

    pub fn root_value(&self) -> f64 {
        self.tree.node(0).value
    }

    /// Replace the executed history (and resample the pool for it).
    pub fn set_history<R: RngCore>(&mut self, h: History, rng: &mut R) -> Result<(), PlannerError> {
        self.pool = self.ctx.particles(&h, self.cfg.particles, rng)?;
        self.history = h;
        self.fresh_tree();
        Ok(())
    }

    fn fresh_tree(&mut self) {
        let mut root = Node::new(
            NO_PARENT,
            None,
            None,
            self.history.last_known().clone(),
            self.history.is_deterministic(),
        );
        root.particles = self.pool.clone();
        self.tree = Tree::with_root(root);
    }

    /// Whether the current history's belief satisfies the goal.
    pub fn at_goal(&self) -> Result<bool, PlannerError> {
        let (steps, known) = self.history.view(self.problem());
        Ok(self.ctx.holds_in_belief(
            self.problem().goal.formula(),
            &steps,
            &known,
            &self.pool,
            self.cfg.strict_applicability,
        )?)
    }

    /// Actions applicable in the current belief.
    pub fn applicable_actions(&self) -> Result<Vec<ActionId>, PlannerError> {
        let p = self.problem();
        let (steps, known) = self.history.view(p);
        let mut out = Vec::new();
        for id in p.action_ids() {
            let pre = p.action(id).pre.formula();
            if self
                .ctx
                .holds_in_belief(pre, &steps, &known, &self.pool, self.cfg.strict_applicability)?
            {
                out.push(id);
            }
        }
        Ok(out)
    }

    /// Runs simulations from the current root and returns the action with the
    /// lowest estimated cost.
    pub fn search<R: RngCore>(&mut self, rng: &mut R) -> Result<SearchResult, PlannerError> {
        if self.at_goal()? {
            return Err(PlannerError::GoalAtRoot);
        }
        let applicable = self.applicable_actions()?;
        if applicable.is_empty() {
            return Err(PlannerError::NoApplicableAction);
        }
        self.prepare_root(&applicable);
        if applicable.len() == 1 {
            return Ok(SearchResult {
                action: applicable[0],
                root_value: self.tree.node(0).value,
                simulations: 0,
                actions: self.root_stats(),
            });
        }

        let start = Instant::now();
        let mut sims = 0u32;
        loop {
            match self.cfg.budget {
                Budget::Simulations(n) if sims >= n => break,
                Budget::TimeoutMs(ms) if sims > 0 && start.elapsed() >= Duration::from_millis(ms) => break,
                _ => {}
            }
            let s = self.pool.choose(rng).expect("pool is nonempty").clone();
            self.simulate(s, 0, 0, rng)?;
            sims += 1;
        }

        let root = self.tree.node(0);
        let visited: Vec<&Edge> = root.edges.iter().filter(|e| e.count > 0).collect();
        let best = visited
            .iter()
            .map(|e| e.value)
            .min_by(|a, b| a.total_cmp(b))
            .ok_or(PlannerError::NoApplicableAction)?;
        let ties: Vec<ActionId> = visited.iter().filter(|e| e.value == best).map(|e| e.action).collect();
        let action = *ties.choose(rng).expect("at least one visited edge");
        Ok(SearchResult {
            action,
            root_value: root.value,
            simulations: sims,
            actions: self.root_stats(),
        })
    }

    fn root_stats(&self) -> Vec<ActionStats> {
        self.tree
            .node(0)
            .edges
            .iter()
            .map(|e| ActionStats {
                action: e.action,
                count: e.count,
                value: e.value,
            })
            .collect()
    }

    /// Root edges are exactly the applicable actions, checked against the
    /// whole pool.
    fn prepare_root(&mut self, applicable: &[ActionId]) {
        let p = self.ctx.problem();
        let root = self.tree.node_mut(0);
        let kept: Vec<ActionId> = applicable
            .iter()
            .copied()
            .filter(|&a| !redundant_sensing(p.action(a), &root.known))
            .collect();
        // Never leave the root without a move.
        let applicable = if kept.is_empty() { applicable } else { &kept[..] };
        root.particles = self.pool.clone();
        root.goal = GoalStatus::NotGoal;
        root.edges.retain(|e| applicable.contains(&e.action));
        for &a in applicable {
            if !root.edges.iter().any(|e| e.action == a) {
                root.edges.push(Edge::new(a));
            }
        }
        root.edges.sort_by_key(|e| e.action);
        for e in root.edges.iter_mut() {
            e.checked = true;
        }
        root.expanded = true;
        if let Some(v) = root.best_value() {
            root.value = v;
        }
    }

    /// Executes `(a, o)`: extends the history, filters the pool and moves the
    /// root to the matching branch.
    pub fn advance<R: RngCore>(
        &mut self,
        a: ActionId,
        observation: Option<Observation>,
        rng: &mut R,
    ) -> Result<(), PlannerError> {
        let p = self.problem();
        self.history.push(
            p,
            HistoryStep {
                action: a,
                observation: observation.clone(),
            },
        )?;
        self.update_pool(a, observation.as_ref(), rng)?;

        let child = self
            .tree
            .node(0)
            .edges
            .iter()
            .find(|e| e.action == a)
            .and_then(|e| e.children.iter().find(|(o, _)| *o == observation).map(|&(_, c)| c));
        match child {
            Some(c) if self.cfg.reuse_tree => {
                self.tree = self.tree.extract(c);
                let root = self.tree.node_mut(0);
                root.known = self.history.last_known().clone();
                root.deterministic = self.history.is_deterministic();
                root.goal = GoalStatus::Unknown;
                root.particles = self.pool.clone();
            }
            _ => self.fresh_tree(),
        }
        Ok(())
    }

    /// Pushes the pool through the executed step, then tops it up with fresh
    /// rejection samples (bounded) and finally by resampling survivors.
    fn update_pool<R: RngCore>(
        &mut self,
        a: ActionId,
        observation: Option<&Observation>,
        rng: &mut R,
    ) -> Result<(), PlannerError> {
        let p = self.ctx.problem();
        let action = p.action(a);
        let mut next = Vec::with_capacity(self.cfg.particles);
        for s in &self.pool {
            if let Some(t) = step_consistent(p, action, s, observation, rng) {
                next.push(t);
            }
        }
        let missing = self.cfg.particles.saturating_sub(next.len());
        if missing > 0 {
            let (steps, _) = self.history.view(p);
            let mut attempts = 0;
            while next.len() < self.cfg.particles && attempts < REJECTION_BUDGET {
                attempts += 1;
                let s0 = self.ctx.sample_initial(rng)?;
                if let Some(s) = crate::belief::push_through(p, &s0, &steps, rng) {
                    next.push(s);
                }
            }
        }
        if next.is_empty() {
            return Err(BeliefError::ParticleDeprivation(REJECTION_BUDGET).into());
        }
        let survivors = next.len();
        while next.len() < self.cfg.particles {
            let i = rng.gen_range(0..survivors);
            next.push(next[i].clone());
        }
        self.pool = next;
        Ok(())
    }

    /// Steps and known-literal sets from the episode start to node `n`.
    fn path(&self, n: NodeId) -> (Vec<(&Action, Option<&Observation>)>, Vec<&Knowledge>) {
        let p = self.problem();
        let (mut steps, mut known) = self.history.view(p);
        let mut chain = Vec::new();
        let mut cur = n;
        while cur != 0 {
            chain.push(cur);
            cur = self.tree.node(cur).parent;
        }
        for &id in chain.iter().rev() {
            let node = self.tree.node(id);
            steps.push((p.action(node.action.expect("non-root node")), node.observation.as_ref()));
            known.push(&node.known);
        }
        (steps, known)
    }

    /// Belief query at node `n`; the flag is false when only particles
    /// confirmed a positive answer.
    fn holds_at(&self, psi: &Formula, n: NodeId) -> Result<(bool, bool), PlannerError> {
        let node = self.tree.node(n);
        if let Some(v) = psi.partial_eval(&|f| node.known.value(f)) {
            return Ok((v, true));
        }
        if node.particles.iter().any(|s| !psi.eval(s)) {
            return Ok((false, true));
        }
        let (steps, known) = self.path(n);
        let v = self
            .ctx
            .holds_in_belief(psi, &steps, &known, &node.particles, self.cfg.strict_applicability)?;
        Ok((v, v && node.deterministic || !v))
    }

    fn simulate<R: RngCore>(&mut self, s: State, n: NodeId, depth: u32, rng: &mut R) -> Result<(), PlannerError> {
        let p = self.ctx.problem();
        {
            let node = self.tree.node_mut(n);
            node.count += 1;
            if n != 0 && node.particles.len() < NODE_PARTICLE_CAP && !node.particles.contains(&s) {
                node.particles.push(s.clone());
            }
        }

        // Goal test on the history.
        let goal = self.tree.node(n).goal;
        let is_goal = match goal {
            GoalStatus::Goal { exact: true } => true,
            GoalStatus::Goal { exact: false } if p.is_goal(&s) => true,
            GoalStatus::NotGoal => false,
            _ => {
                let (v, exact) = self.holds_at(p.goal.formula(), n)?;
                let node = self.tree.node_mut(n);
                node.goal = if v { GoalStatus::Goal { exact } } else { GoalStatus::NotGoal };
                v
            }
        };
        if is_goal {
            self.tree.node_mut(n).value = 0.0;
            return Ok(());
        }

        if depth > self.cfg.max_tree_depth {
            let r = self.rollout(&s, n, rng) as f64;
            let node = self.tree.node_mut(n);
            node.rollouts += 1;
            node.value += (r - node.value) / node.rollouts as f64;
            return Ok(());
        }

        if !self.tree.node(n).expanded {
            self.expand(n);
        }

        let (ei, next, obs) = loop {
            let Some(ei) = self.select(n, &s, rng)? else {
                // No applicable action: pessimistic cost, like a failed rollout.
                let node = self.tree.node_mut(n);
                node.value = self.cfg.max_rollout_depth as f64;
                return Ok(());
            };
            let a = p.action(self.tree.node(n).edges[ei].action);
            match p.step(a, &s, rng) {
                Ok((next, obs)) => break (ei, next, obs),
                Err(_) => {
                    // A particle of this belief refutes the precondition.
                    self.remove_edge(n, ei);
                }
            }
        };

        let child = self.child_for(n, ei, obs, rng);
        self.simulate(next, child, depth + 1, rng)?;

        let tree = &mut self.tree;
        let (value, total) = edge_backup(tree.node(n).edges[ei].children.iter().map(|&(_, c)| {
            let c = tree.node(c);
            (c.count, c.value)
        }));
        let node = tree.node_mut(n);
        let edge = &mut node.edges[ei];
        edge.count += 1;
        debug_assert_eq!(edge.count, total, "action count equals the sum of observation counts");
        edge.value = value;
        node.value = node.best_value().expect("the selected edge was visited");
        debug_assert!(node.edges.iter().all(|e| e.count == 0 || e.value >= node.value));
        Ok(())
    }

    /// Edges for every action not ruled out by the known literals; the
    /// belief test runs when an edge is first selected.
    fn expand(&mut self, n: NodeId) {
        let p = self.ctx.problem();
        let node = self.tree.node_mut(n);
        let known = &node.known;
        node.edges = p
            .action_ids()
            .filter(|&a| p.action(a).pre.formula().partial_eval(&|f| known.value(f)) != Some(false))
            .filter(|&a| !redundant_sensing(p.action(a), known))
            .map(Edge::new)
            .collect();
        node.expanded = true;
    }

    fn remove_edge(&mut self, n: NodeId, ei: usize) {
        let node = self.tree.node_mut(n);
        node.edges.remove(ei);
        node.value = node.best_value().unwrap_or(node.value);
    }

    /// Unvisited edges first (uniformly), then the UCT rule over visited ones.
    fn select<R: RngCore>(&mut self, n: NodeId, s: &State, rng: &mut R) -> Result<Option<usize>, PlannerError> {
        let p = self.ctx.problem();
        loop {
            let node = self.tree.node(n);
            if node.edges.is_empty() {
                return Ok(None);
            }
            let unvisited: Vec<usize> = (0..node.edges.len()).filter(|&i| node.edges[i].count == 0).collect();
            let ei = if let Some(&ei) = unvisited.choose(rng) {
                ei
            } else {
                let log_n = (node.count as f64).ln();
                let c = self.cfg.exploration_c;
                let mut best = f64::INFINITY;
                let mut ties = Vec::new();
                for (i, e) in node.edges.iter().enumerate() {
                    let score = e.value - c * (log_n / e.count as f64).sqrt();
                    if score < best {
                        best = score;
                        ties.clear();
                    }
                    if score == best {
                        ties.push(i);
                    }
                }
                *ties.choose(rng).expect("edges are nonempty")
            };
            let edge = &node.edges[ei];
            let action = p.action(edge.action);
            if !action.pre.holds(s) {
                self.remove_edge(n, ei);
                continue;
            }
            if !edge.checked {
                let (ok, _) = self.holds_at(action.pre.formula(), n)?;
                if !ok {
                    self.remove_edge(n, ei);
                    continue;
                }
                self.tree.node_mut(n).edges[ei].checked = true;
            }
            return Ok(Some(ei));
        }
    }

    /// Child of edge `ei` for observation `obs`, created with particles
    /// inherited from `n` on first use.
    fn child_for<R: RngCore>(&mut self, n: NodeId, ei: usize, obs: Option<Observation>, rng: &mut R) -> NodeId {
        if let Some(&(_, c)) = self.tree.node(n).edges[ei].children.iter().find(|(o, _)| *o == obs) {
            return c;
        }
        let p = self.ctx.problem();
        let parent = self.tree.node(n);
        let a = parent.edges[ei].action;
        let action = p.action(a);
        let known = parent.known.after(action, obs.as_ref());
        let mut child = Node::new(n, Some(a), obs.clone(), known, parent.deterministic && action.is_deterministic());
        let take = parent.particles.len().min(INHERITED_PARTICLES);
        for s in parent.particles.choose_multiple(rng, take) {
            if let Some(t) = step_consistent(p, action, s, obs.as_ref(), rng) {
                if !child.particles.contains(&t) {
                    child.particles.push(t);
                }
            }
        }
        let id = self.tree.add(child);
        self.tree.node_mut(n).edges[ei].children.push((obs, id));
        id
    }

    /// Heuristic rollout from `s`, with the node's other particles as `B`.
    fn rollout<R: RngCore>(&mut self, s: &State, n: NodeId, rng: &mut R) -> u32 {
        let p = self.ctx.problem();
        let max = self.cfg.max_rollout_depth;
        let mut s = s.clone();
        let mut b: Vec<State> = Vec::with_capacity(ROLLOUT_BELIEF_CAP);
        for t in &self.tree.node(n).particles {
            if b.len() == ROLLOUT_BELIEF_CAP {
                break;
            }
            if *t != s && !b.contains(t) {
                b.push(t.clone());
            }
        }
        let mut depth = 0;
        while !p.is_goal(&s) && depth < max {
            let rng_dyn: &mut dyn RngCore = &mut *rng;
            let Some(a) = self.policy.choose(p, &s, &b, rng_dyn, &mut self.scratch) else {
                return max;
            };
            let action = p.action(a);
            let Ok((next, obs)) = p.step(action, &s, rng) else {
                return max;
            };
            s = next;
            let mut kept = Vec::with_capacity(b.len());
            for t in &b {
                if let Some(t2) = step_consistent(p, action, t, obs.as_ref(), rng) {
                    if t2 != s && !kept.contains(&t2) {
                        kept.push(t2);
                    }
                }
            }
            b = kept;
            depth += 1;
        }
        depth
    }
}

/// Successor of `s` under `a` that agrees with `observation`, if any.
fn step_consistent<R: Rng + ?Sized>(
    p: &Problem,
    a: &Action,
    s: &State,
    observation: Option<&Observation>,
    rng: &mut R,
) -> Option<State> {
    let (t, o) = p.step(a, s, rng).ok()?;
    match (observation, o) {
        (Some(want), Some(got)) if *want == got => Some(t),
        (None, None) => Some(t),
        _ => None,
    }
}


/// A pure sensing action whose observed facts are all known is a self-loop
/// in belief space: it costs a step and its outcome is fixed.
fn redundant_sensing(a: &Action, known: &Knowledge) -> bool {
    a.kind == ActionKind::Sensing && a.observes.iter().all(|&f| known.value(f).is_some())
}

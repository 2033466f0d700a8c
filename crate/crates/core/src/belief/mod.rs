//! Belief reasoning over histories: regression, known-literal caches,
//! entailment against the initial belief, and particle operations.

mod knowledge;
mod regression;
mod sampler;
pub mod sat;

use rand::Rng;
use thiserror::Error;

use crate::model::{Action, ActionId, Formula, ModelError, Observation, Problem, State};

pub use knowledge::Knowledge;
pub use regression::{regress_action, regress_observation, regress_path};
pub use sampler::InitialSampler;

/// Attempts per needed particle before reporting particle deprivation.
pub const REJECTION_BUDGET: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeliefError {
    #[error("`{0}` has stochastic effects; regression needs deterministic actions")]
    StochasticAction(String),
    #[error("observation does not match the sensed facts of `{0}`")]
    ObservationMismatch(String),
    #[error("the initial belief is unsatisfiable")]
    UnsatisfiableInitial,
    #[error("particle deprivation: no history-consistent state after {0} attempts")]
    ParticleDeprivation(usize),
    #[error("belief query on a stochastic history with no particles")]
    EmptyParticles,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HistoryStep {
    pub action: ActionId,
    pub observation: Option<Observation>,
}

/// Executed actions and received observations, with the forward known-literal
/// cache for every prefix.
#[derive(Debug, Clone)]
pub struct History {
    steps: Vec<HistoryStep>,
    known: Vec<Knowledge>,
    deterministic: bool,
}

impl History {
    pub fn new(p: &Problem) -> Self {
        History {
            steps: Vec::new(),
            known: vec![Knowledge::initial(p)],
            deterministic: true,
        }
    }

    pub fn push(&mut self, p: &Problem, step: HistoryStep) -> Result<(), BeliefError> {
        let a = p.action(step.action);
        match (&step.observation, a.senses()) {
            (Some(o), true) => {
                let mut expected = a.observes.clone();
                expected.sort_unstable();
                expected.dedup();
                if o.0.iter().map(|&(f, _)| f).ne(expected.iter().copied()) {
                    return Err(BeliefError::ObservationMismatch(a.name.clone()));
                }
            }
            (None, false) => {}
            _ => return Err(BeliefError::ObservationMismatch(a.name.clone())),
        }
        let next = self.last_known().after(a, step.observation.as_ref());
        self.deterministic &= a.is_deterministic();
        self.known.push(next);
        self.steps.push(step);
        Ok(())
    }

    pub fn steps(&self) -> &[HistoryStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Known literals after the first `i` steps.
    pub fn known(&self, i: usize) -> &Knowledge {
        &self.known[i]
    }

    pub fn last_known(&self) -> &Knowledge {
        self.known.last().expect("history keeps the initial knowledge")
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// Borrowed view of the history for path-based queries.
    pub fn view<'a>(&'a self, p: &'a Problem) -> (Vec<(&'a Action, Option<&'a Observation>)>, Vec<&'a Knowledge>) {
        let steps = self
            .steps
            .iter()
            .map(|s| (p.action(s.action), s.observation.as_ref()))
            .collect();
        (steps, self.known.iter().collect())
    }
}

/// Regress a formula through a whole deterministic history.
pub fn regress_history(p: &Problem, phi: &Formula, h: &History) -> Result<Formula, BeliefError> {
    if let Some(s) = h.steps.iter().find(|s| !p.action(s.action).is_deterministic()) {
        return Err(BeliefError::StochasticAction(p.action(s.action).name.clone()));
    }
    let (steps, known) = h.view(p);
    regress_path(phi, &steps, &known)
}

/// Apply a history to a state; `None` when a precondition fails or an
/// observation disagrees.
pub fn push_through<R: Rng + ?Sized>(
    p: &Problem,
    s: &State,
    steps: &[(&Action, Option<&Observation>)],
    rng: &mut R,
) -> Option<State> {
    let mut cur = s.clone();
    for &(a, o) in steps {
        if !a.applicable(&cur) {
            return None;
        }
        if a.actuates() {
            cur = p.apply_effects(a, &cur, rng).ok()?;
        }
        if let Some(o) = o {
            if !o.agrees_with(&cur) {
                return None;
            }
        }
    }
    Some(cur)
}

pub fn push_through_history<R: Rng + ?Sized>(p: &Problem, s: &State, h: &History, rng: &mut R) -> Option<State> {
    let (steps, _) = h.view(p);
    push_through(p, s, &steps, rng)
}

/// Problem-level belief reasoning: the initial belief as CNF and a sampler.
#[derive(Debug, Clone)]
pub struct BeliefContext<'p> {
    problem: &'p Problem,
    init_cnf: sat::Cnf,
    sampler: InitialSampler,
}

impl<'p> BeliefContext<'p> {
    pub fn new(problem: &'p Problem) -> Result<Self, BeliefError> {
        let mut init_cnf = sat::Cnf::new(problem.num_facts());
        init_cnf.assert_formula(&problem.initial_formula());
        if init_cnf.solve().is_none() {
            return Err(BeliefError::UnsatisfiableInitial);
        }
        let sampler = InitialSampler::new(problem)?;
        Ok(BeliefContext {
            problem,
            init_cnf,
            sampler,
        })
    }

    pub fn problem(&self) -> &'p Problem {
        self.problem
    }

    /// Whether every model of φ_I ∧ support(pr_I) satisfies `psi`.
    pub fn entails(&self, psi: &Formula) -> bool {
        match psi {
            Formula::True => true,
            Formula::False => false,
            _ => {
                let mut cnf = self.init_cnf.clone();
                cnf.assert_formula(&Formula::not(psi.clone()));
                cnf.solve().is_none()
            }
        }
    }

    pub fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<State, BeliefError> {
        self.sampler.sample(rng)
    }

    /// Rejection-sample a state consistent with the steps.
    pub fn sample_consistent<R: Rng + ?Sized>(
        &self,
        steps: &[(&Action, Option<&Observation>)],
        budget: usize,
        rng: &mut R,
    ) -> Result<State, BeliefError> {
        for _ in 0..budget {
            let s0 = self.sample_initial(rng)?;
            if let Some(s) = push_through(self.problem, &s0, steps, rng) {
                return Ok(s);
            }
        }
        Err(BeliefError::ParticleDeprivation(budget))
    }

    /// Whether `psi` holds in every state of the belief after the steps.
    ///
    /// The known-literal cache answers first. A particle violating `psi`
    /// refutes it. Deterministic paths are then decided exactly by regression
    /// and entailment; stochastic paths accept when every particle satisfies
    /// `psi`, or reject when `strict` is set.
    pub fn holds_in_belief(
        &self,
        psi: &Formula,
        steps: &[(&Action, Option<&Observation>)],
        known: &[&Knowledge],
        particles: &[State],
        strict: bool,
    ) -> Result<bool, BeliefError> {
        let last = known.last().expect("known has an entry per prefix");
        if let Some(v) = psi.partial_eval(&|f| last.value(f)) {
            return Ok(v);
        }
        if particles.iter().any(|s| !psi.eval(s)) {
            return Ok(false);
        }
        if steps.iter().all(|(a, _)| a.is_deterministic()) {
            let r = regress_path(psi, steps, known)?;
            return Ok(self.entails(&r));
        }
        if particles.is_empty() {
            return Err(BeliefError::EmptyParticles);
        }
        Ok(!strict)
    }

    pub fn holds_after(&self, psi: &Formula, h: &History, particles: &[State]) -> Result<bool, BeliefError> {
        let (steps, known) = h.view(self.problem);
        self.holds_in_belief(psi, &steps, &known, particles, false)
    }

    /// `n` particles drawn independently from the belief after the history.
    pub fn particles<R: Rng + ?Sized>(&self, h: &History, n: usize, rng: &mut R) -> Result<Vec<State>, BeliefError> {
        let (steps, _) = h.view(self.problem);
        (0..n)
            .map(|_| self.sample_consistent(&steps, REJECTION_BUDGET, rng))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConditionalEffect, FactId, Guard, InitialBelief, Literal, StochasticFormula};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Facts: 0 = at-a, 1 = at-b, 2 = open-b, 3 = open-c.
    fn corridor() -> Problem {
        let move_b = Action::actuation(
            "move-b",
            Formula::and([Formula::atom(FactId(0)), Formula::atom(FactId(2))]),
            vec![ConditionalEffect {
                condition: Guard::always(),
                outcome: StochasticFormula::deterministic(vec![Literal::neg(FactId(0)), Literal::pos(FactId(1))]),
            }],
        );
        let sense = Action::sensing("sense-b", Formula::atom(FactId(0)), vec![FactId(2)]);
        Problem::new(
            "p",
            "d",
            vec!["at-a".into(), "at-b".into(), "open-b".into(), "open-c".into()],
            vec![move_b, sense],
            InitialBelief {
                known: vec![Literal::pos(FactId(0))],
                constraints: vec![Formula::OneOf(vec![Literal::pos(FactId(2)), Literal::pos(FactId(3))])],
                stochastic: vec![],
            },
            Formula::atom(FactId(1)),
        )
        .unwrap()
    }

    #[test]
    fn entailment_against_oneof() {
        let p = corridor();
        let ctx = BeliefContext::new(&p).unwrap();
        assert!(ctx.entails(&Formula::True));
        assert!(ctx.entails(&Formula::or([Formula::atom(FactId(2)), Formula::atom(FactId(3))])));
        assert!(!ctx.entails(&Formula::atom(FactId(2))));
    }

    #[test]
    fn sensing_then_moving_reaches_goal_belief() {
        let p = corridor();
        let ctx = BeliefContext::new(&p).unwrap();
        let mut h = History::new(&p);
        let move_b = p.action_by_name("move-b").unwrap();
        let pre = p.action(move_b).pre.formula().clone();
        assert!(!ctx.holds_after(&pre, &h, &[]).unwrap());

        let mut s = p.base_state().clone();
        s.set(FactId(2), true);
        let sense = p.action_by_name("sense-b").unwrap();
        let o = p.apply_sensing(p.action(sense), &s).unwrap();
        h.push(&p, HistoryStep { action: sense, observation: Some(o) }).unwrap();
        assert!(ctx.holds_after(&pre, &h, &[]).unwrap());
        h.push(&p, HistoryStep { action: move_b, observation: None }).unwrap();
        assert!(ctx.holds_after(&p.goal.formula().clone(), &h, &[]).unwrap());
        // open-b was learned before the move and survives it.
        assert_eq!(h.last_known().value(FactId(2)), Some(true));
        assert!(ctx.entails(&regress_history(&p, &Formula::atom(FactId(1)), &h).unwrap()));
    }

    #[test]
    fn rejection_matches_analytic_rate() {
        let p = corridor();
        let ctx = BeliefContext::new(&p).unwrap();
        let sense = p.action_by_name("sense-b").unwrap();
        let mut s = p.base_state().clone();
        s.set(FactId(2), true);
        let o = p.apply_sensing(p.action(sense), &s).unwrap();
        let mut h = History::new(&p);
        h.push(&p, HistoryStep { action: sense, observation: Some(o) }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rejected = (0..10_000)
            .filter(|_| {
                let s0 = ctx.sample_initial(&mut rng).unwrap();
                push_through_history(&p, &s0, &h, &mut rng).is_none()
            })
            .count();
        assert!((rejected as f64 / 10_000.0 - 0.5).abs() < 0.02);
    }

    #[test]
    fn observation_keys_must_match() {
        let p = corridor();
        let mut h = History::new(&p);
        let sense = p.action_by_name("sense-b").unwrap();
        assert!(h.push(&p, HistoryStep { action: sense, observation: None }).is_err());
    }
}

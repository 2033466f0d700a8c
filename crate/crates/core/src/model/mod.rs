//! Grounded stochastic contingent planning tasks and their transition semantics.

mod formula;

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use smallvec::SmallVec;
use thiserror::Error;

use crate::bitset::BitSet;

pub use formula::{FactId, Formula, FormulaDisplay, Literal};

/// Tolerance on stochastic option probabilities summing to one.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("precondition of `{action}` violated")]
    PreconditionViolated { action: String },
    #[error("`{action}` asserts both polarities of `{fact}` in one step")]
    ConflictingEffects { action: String, fact: String },
    #[error("fact id {0} is not declared")]
    UndeclaredFact(u32),
    #[error("probabilities of a stochastic formula sum to {sum}, expected 1")]
    BadProbabilitySum { sum: f64 },
    #[error("stochastic option has probability {0}, expected a value in (0,1]")]
    BadProbability(f64),
    #[error("stochastic formula has an empty option")]
    EmptyOption,
    #[error("option asserts both polarities of `{0}`")]
    ContradictoryOption(String),
    #[error("oneof needs at least two distinct facts")]
    DegenerateOneOf,
    #[error("sensing action `{0}` observes nothing")]
    EmptyObservation(String),
    #[error("fact `{0}` is both known and constrained in the initial belief")]
    KnownAndHidden(String),
    #[error("duplicate fact name `{0}`")]
    DuplicateFact(String),
}

/// Total truth assignment over the facts of a problem.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct State(BitSet);

impl State {
    pub fn new(num_facts: usize) -> Self {
        State(BitSet::new(num_facts))
    }

    #[inline]
    pub fn get(&self, f: FactId) -> bool {
        self.0.contains(f.index())
    }

    #[inline]
    pub fn set(&mut self, f: FactId, value: bool) {
        self.0.set(f.index(), value)
    }

    #[inline]
    pub fn apply(&mut self, l: Literal) {
        self.0.set(l.fact.index(), l.positive)
    }

    pub fn true_facts(&self) -> impl Iterator<Item = FactId> + '_ {
        self.0.iter().map(|i| FactId(i as u32))
    }

    pub fn bits(&self) -> &BitSet {
        &self.0
    }

    pub fn from_bits(bits: BitSet) -> Self {
        State(bits)
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "State{:?}", self.0)
    }
}

/// A formula with a precomputed literal-conjunction fast path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guard {
    formula: Formula,
    conj: Option<SmallVec<[Literal; 4]>>,
}

impl Guard {
    pub fn new(formula: Formula) -> Self {
        let conj = formula.conjunctive_literals().map(SmallVec::from_vec);
        Guard { formula, conj }
    }

    pub fn always() -> Self {
        Guard::new(Formula::True)
    }

    #[inline]
    pub fn holds(&self, s: &State) -> bool {
        match &self.conj {
            Some(ls) => ls.iter().all(|l| l.holds_in(s)),
            None => self.formula.eval(s),
        }
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    /// Literals of the guard when it is a plain conjunction.
    pub fn literals(&self) -> Option<&[Literal]> {
        self.conj.as_deref()
    }

    pub fn is_trivial(&self) -> bool {
        self.formula == Formula::True
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticOption {
    pub literals: Vec<Literal>,
    pub probability: f64,
}

/// A set of options with probabilities summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticFormula {
    pub options: Vec<StochasticOption>,
}

impl StochasticFormula {
    pub fn deterministic(literals: Vec<Literal>) -> Self {
        StochasticFormula {
            options: vec![StochasticOption {
                literals,
                probability: 1.0,
            }],
        }
    }

    pub fn new(options: Vec<StochasticOption>) -> Result<Self, ModelError> {
        let f = StochasticFormula { options };
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<(), ModelError> {
        let mut sum = 0.0;
        for o in &self.options {
            if !(o.probability > 0.0 && o.probability <= 1.0) {
                return Err(ModelError::BadProbability(o.probability));
            }
            if o.literals.is_empty() {
                return Err(ModelError::EmptyOption);
            }
            sum += o.probability;
        }
        if self.options.is_empty() || (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(ModelError::BadProbabilitySum { sum });
        }
        Ok(())
    }

    pub fn is_deterministic(&self) -> bool {
        self.options.len() == 1
    }

    /// Index of a sampled option. Single-option formulas draw no randomness.
    #[inline]
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.options.len() == 1 {
            return 0;
        }
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, o) in self.options.iter().enumerate() {
            acc += o.probability;
            if u < acc {
                return i;
            }
        }
        self.options.len() - 1
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &StochasticOption {
        &self.options[self.sample_index(rng)]
    }

    /// All facts mentioned in any option, sorted.
    pub fn facts(&self) -> Vec<FactId> {
        let mut out: Vec<FactId> = self
            .options
            .iter()
            .flat_map(|o| o.literals.iter().map(|l| l.fact))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Support as a formula: exactly the option assignments, where facts of the
    /// clause not mentioned by an option are false under that option.
    pub fn support(&self) -> Formula {
        let facts = self.facts();
        Formula::or(self.options.iter().map(|o| {
            let mut parts: Vec<Formula> = o.literals.iter().map(|&l| Formula::Lit(l)).collect();
            for &f in &facts {
                if !o.literals.iter().any(|l| l.fact == f) {
                    parts.push(Formula::Lit(Literal::neg(f)));
                }
            }
            Formula::and(parts)
        }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalEffect {
    pub condition: Guard,
    pub outcome: StochasticFormula,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct ActionId(pub u32);

impl ActionId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Actuation,
    Sensing,
    /// Actuation followed by a forced sensing step under the same name.
    Combined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub name: String,
    pub kind: ActionKind,
    pub pre: Guard,
    pub effects: Vec<ConditionalEffect>,
    pub observes: Vec<FactId>,
}

impl Action {
    pub fn actuation(name: impl Into<String>, pre: Formula, effects: Vec<ConditionalEffect>) -> Self {
        Action {
            name: name.into(),
            kind: ActionKind::Actuation,
            pre: Guard::new(pre),
            effects,
            observes: Vec::new(),
        }
    }

    pub fn sensing(name: impl Into<String>, pre: Formula, observes: Vec<FactId>) -> Self {
        Action {
            name: name.into(),
            kind: ActionKind::Sensing,
            pre: Guard::new(pre),
            effects: Vec::new(),
            observes,
        }
    }

    pub fn combined(
        name: impl Into<String>,
        pre: Formula,
        effects: Vec<ConditionalEffect>,
        observes: Vec<FactId>,
    ) -> Self {
        Action {
            name: name.into(),
            kind: ActionKind::Combined,
            pre: Guard::new(pre),
            effects,
            observes,
        }
    }

    #[inline]
    pub fn senses(&self) -> bool {
        !self.observes.is_empty()
    }

    #[inline]
    pub fn actuates(&self) -> bool {
        self.kind != ActionKind::Sensing
    }

    #[inline]
    pub fn applicable(&self, s: &State) -> bool {
        self.pre.holds(s)
    }

    pub fn is_deterministic(&self) -> bool {
        self.effects.iter().all(|e| e.outcome.is_deterministic())
    }

    /// Disjunction of conditions of effects that may assert `l` (c_{a,l}).
    /// For stochastic effects only deterministic assertions count.
    pub fn achiever_condition(&self, l: Literal) -> Formula {
        Formula::or(
            self.effects
                .iter()
                .filter(|e| e.outcome.is_deterministic() && e.outcome.options[0].literals.contains(&l))
                .map(|e| e.condition.formula().clone())
                .collect::<Vec<_>>(),
        )
    }

    /// Literals asserted unconditionally and deterministically.
    pub fn unconditional_literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.effects
            .iter()
            .filter(|e| e.condition.is_trivial() && e.outcome.is_deterministic())
            .flat_map(|e| e.outcome.options[0].literals.iter().copied())
    }

    /// Whether some effect option mentions the fact.
    pub fn may_modify(&self, f: FactId) -> bool {
        self.effects
            .iter()
            .any(|e| e.outcome.options.iter().any(|o| o.literals.iter().any(|l| l.fact == f)))
    }
}

/// Observed values of the sensed facts, sorted by fact id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Observation(pub SmallVec<[(FactId, bool); 2]>);

impl Observation {
    pub fn of(facts: &[FactId], s: &State) -> Self {
        let mut v: SmallVec<[(FactId, bool); 2]> = facts.iter().map(|&f| (f, s.get(f))).collect();
        v.sort_unstable();
        Observation(v)
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.0.iter().map(|&(f, v)| Literal { fact: f, positive: v })
    }

    pub fn agrees_with(&self, s: &State) -> bool {
        self.0.iter().all(|&(f, v)| s.get(f) == v)
    }

    pub fn value(&self, f: FactId) -> Option<bool> {
        self.0.iter().find(|(g, _)| *g == f).map(|&(_, v)| v)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Source position of a grounded element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// The initial belief: known literals, uniform constraints and independent
/// stochastic clauses over the hidden facts.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InitialBelief {
    /// Literals fixed in every initial state. Facts neither known nor hidden are false.
    pub known: Vec<Literal>,
    /// Constraints over hidden facts (oneof / or clauses and the like).
    pub constraints: Vec<Formula>,
    /// Independent stochastic clauses (pr_I).
    pub stochastic: Vec<StochasticFormula>,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub domain: String,
    facts: Vec<String>,
    index: HashMap<String, FactId>,
    actions: Vec<Action>,
    pub initial: InitialBelief,
    pub goal: Guard,
    hidden: BitSet,
    base_state: State,
    /// Source locations of actions, when parsed from text.
    pub action_spans: Vec<Option<Span>>,
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        domain: impl Into<String>,
        facts: Vec<String>,
        actions: Vec<Action>,
        initial: InitialBelief,
        goal: Formula,
    ) -> Result<Self, ModelError> {
        let mut index = HashMap::with_capacity(facts.len());
        for (i, n) in facts.iter().enumerate() {
            if index.insert(n.clone(), FactId(i as u32)).is_some() {
                return Err(ModelError::DuplicateFact(n.clone()));
            }
        }
        let n = facts.len();
        let check_lit = |l: Literal| -> Result<(), ModelError> {
            if l.fact.index() >= n {
                Err(ModelError::UndeclaredFact(l.fact.0))
            } else {
                Ok(())
            }
        };
        let check_formula = |f: &Formula| -> Result<(), ModelError> {
            let mut res = Ok(());
            let mut degenerate = false;
            check_oneofs(f, &mut degenerate);
            f.for_each_literal(&mut |l| {
                if res.is_ok() {
                    res = check_lit(l);
                }
            });
            if degenerate {
                return Err(ModelError::DegenerateOneOf);
            }
            res
        };
        let check_option_set = |sf: &StochasticFormula| -> Result<(), ModelError> {
            sf.check()?;
            for o in &sf.options {
                for &l in &o.literals {
                    check_lit(l)?;
                    if o.literals.contains(&l.negate()) {
                        return Err(ModelError::ContradictoryOption(facts[l.fact.index()].clone()));
                    }
                }
            }
            Ok(())
        };
        for a in &actions {
            check_formula(a.pre.formula())?;
            for e in &a.effects {
                check_formula(e.condition.formula())?;
                check_option_set(&e.outcome)?;
            }
            for &f in &a.observes {
                check_lit(Literal::pos(f))?;
            }
            if a.kind != ActionKind::Actuation && a.observes.is_empty() {
                return Err(ModelError::EmptyObservation(a.name.clone()));
            }
        }
        check_formula(&goal)?;
        let mut hidden = BitSet::new(n);
        for c in &initial.constraints {
            check_formula(c)?;
            for f in c.facts() {
                hidden.insert(f.index());
            }
        }
        for sf in &initial.stochastic {
            check_option_set(sf)?;
            for f in sf.facts() {
                hidden.insert(f.index());
            }
        }
        let mut base_state = State::new(n);
        for &l in &initial.known {
            check_lit(l)?;
            if hidden.contains(l.fact.index()) {
                return Err(ModelError::KnownAndHidden(facts[l.fact.index()].clone()));
            }
            base_state.apply(l);
        }
        let num_actions = actions.len();
        Ok(Problem {
            name: name.into(),
            domain: domain.into(),
            facts,
            index,
            actions,
            initial,
            goal: Guard::new(goal),
            hidden,
            base_state,
            action_spans: vec![None; num_actions],
        })
    }

    pub fn num_facts(&self) -> usize {
        self.facts.len()
    }

    pub fn fact_name(&self, f: FactId) -> &str {
        &self.facts[f.index()]
    }

    pub fn fact_names(&self) -> &[String] {
        &self.facts
    }

    pub fn fact(&self, name: &str) -> Option<FactId> {
        self.index.get(name).copied()
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn action(&self, id: ActionId) -> &Action {
        &self.actions[id.index()]
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn action_by_name(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a.name == name).map(|i| ActionId(i as u32))
    }

    /// Facts whose initial value is uncertain.
    pub fn hidden_facts(&self) -> &BitSet {
        &self.hidden
    }

    pub fn is_hidden_initially(&self, f: FactId) -> bool {
        self.hidden.contains(f.index())
    }

    /// Initial state with all known facts set and every hidden fact false.
    pub fn base_state(&self) -> &State {
        &self.base_state
    }

    /// Known initial value of a fact, `None` when hidden.
    pub fn initial_value(&self, f: FactId) -> Option<bool> {
        if self.is_hidden_initially(f) {
            None
        } else {
            Some(self.base_state.get(f))
        }
    }

    /// φ_I ∧ support(pr_I) as a single formula over the hidden facts, with
    /// known literals included as unit conjuncts.
    pub fn initial_formula(&self) -> Formula {
        let mut parts: Vec<Formula> = Vec::new();
        for f in 0..self.num_facts() {
            let id = FactId(f as u32);
            if !self.is_hidden_initially(id) {
                parts.push(Formula::Lit(Literal {
                    fact: id,
                    positive: self.base_state.get(id),
                }));
            }
        }
        parts.extend(self.initial.constraints.iter().cloned());
        parts.extend(self.initial.stochastic.iter().map(|s| s.support()));
        Formula::and(parts)
    }

    /// Whether the initial state set contains the state.
    pub fn initially_possible(&self, s: &State) -> bool {
        (0..self.num_facts()).all(|f| {
            let id = FactId(f as u32);
            self.is_hidden_initially(id) || s.get(id) == self.base_state.get(id)
        }) && self.initial.constraints.iter().all(|c| c.eval(s))
            && self.initial.stochastic.iter().all(|sf| sf.support().eval(s))
    }

    pub fn is_goal(&self, s: &State) -> bool {
        self.goal.holds(s)
    }

    /// Sample a successor by applying an actuation action. Every effect's
    /// condition is evaluated in `s` before any literal is written.
    pub fn apply_actuation<R: Rng + ?Sized>(
        &self,
        a: &Action,
        s: &State,
        rng: &mut R,
    ) -> Result<State, ModelError> {
        if !a.applicable(s) {
            return Err(ModelError::PreconditionViolated { action: a.name.clone() });
        }
        self.apply_effects(a, s, rng)
    }

    pub(crate) fn apply_effects<R: Rng + ?Sized>(
        &self,
        a: &Action,
        s: &State,
        rng: &mut R,
    ) -> Result<State, ModelError> {
        let mut next = s.clone();
        let mut written: SmallVec<[Literal; 8]> = SmallVec::new();
        for e in &a.effects {
            if !e.condition.holds(s) {
                continue;
            }
            let option = e.outcome.sample(rng);
            for &l in &option.literals {
                if written.contains(&l.negate()) {
                    return Err(ModelError::ConflictingEffects {
                        action: a.name.clone(),
                        fact: self.fact_name(l.fact).to_string(),
                    });
                }
                written.push(l);
                next.apply(l);
            }
        }
        Ok(next)
    }

    /// Read the observed facts. The state is left untouched.
    pub fn apply_sensing(&self, a: &Action, s: &State) -> Result<Observation, ModelError> {
        if !a.applicable(s) {
            return Err(ModelError::PreconditionViolated { action: a.name.clone() });
        }
        Ok(Observation::of(&a.observes, s))
    }

    /// Execute any kind of action: actuation part first (if any), then the
    /// observation read from the resulting state (if the action senses).
    pub fn step<R: Rng + ?Sized>(
        &self,
        a: &Action,
        s: &State,
        rng: &mut R,
    ) -> Result<(State, Option<Observation>), ModelError> {
        if !a.applicable(s) {
            return Err(ModelError::PreconditionViolated { action: a.name.clone() });
        }
        let next = if a.actuates() {
            self.apply_effects(a, s, rng)?
        } else {
            s.clone()
        };
        let obs = if a.senses() {
            Some(Observation::of(&a.observes, &next))
        } else {
            None
        };
        Ok((next, obs))
    }

    pub fn display_formula<'a>(&'a self, f: &'a Formula) -> String {
        let names = |id: FactId| self.fact_name(id).to_string();
        f.display(&names).to_string()
    }
}

/// Evaluate a formula on a state.
pub fn evaluate(f: &Formula, s: &State) -> bool {
    f.eval(s)
}

fn check_oneofs(f: &Formula, degenerate: &mut bool) {
    match f {
        Formula::OneOf(ls) => {
            let mut facts: Vec<FactId> = ls.iter().map(|l| l.fact).collect();
            facts.sort_unstable();
            facts.dedup();
            if facts.len() < 2 {
                *degenerate = true;
            }
        }
        Formula::Not(g) => check_oneofs(g, degenerate),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| check_oneofs(g, degenerate)),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(i: u32) -> FactId {
        FactId(i)
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("f{i}")).collect()
    }

    fn det(cond: Formula, lits: Vec<Literal>) -> ConditionalEffect {
        ConditionalEffect {
            condition: Guard::new(cond),
            outcome: StochasticFormula::deterministic(lits),
        }
    }

    #[test]
    fn deterministic_unconditional_effect() {
        let a = Action::actuation("a", Formula::atom(f(0)), vec![det(Formula::True, vec![Literal::pos(f(1))])]);
        let p = Problem::new("p", "d", names(2), vec![a], InitialBelief::default(), Formula::True).unwrap();
        let mut s = State::new(2);
        s.set(f(0), true);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = p.apply_actuation(&p.actions()[0], &s, &mut rng).unwrap();
        assert!(t.get(f(0)) && t.get(f(1)));
    }

    #[test]
    fn precondition_violation_is_an_error() {
        let a = Action::actuation("a", Formula::atom(f(0)), vec![]);
        let p = Problem::new("p", "d", names(1), vec![a], InitialBelief::default(), Formula::True).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = p.apply_actuation(&p.actions()[0], &State::new(1), &mut rng).unwrap_err();
        assert!(matches!(err, ModelError::PreconditionViolated { .. }));
    }

    #[test]
    fn conditions_read_the_pre_action_state() {
        // (when p (not p)) and (when p q): both fire on a state with p.
        let a = Action::actuation(
            "a",
            Formula::True,
            vec![
                det(Formula::atom(f(0)), vec![Literal::neg(f(0))]),
                det(Formula::atom(f(0)), vec![Literal::pos(f(1))]),
            ],
        );
        let p = Problem::new("p", "d", names(2), vec![a], InitialBelief::default(), Formula::True).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for bits in 0..4u32 {
            let mut s = State::new(2);
            s.set(f(0), bits & 1 != 0);
            s.set(f(1), bits & 2 != 0);
            let t = p.apply_actuation(&p.actions()[0], &s, &mut rng).unwrap();
            let (p0, q0) = (s.get(f(0)), s.get(f(1)));
            assert_eq!(t.get(f(0)), false);
            assert_eq!(t.get(f(1)), q0 || p0);
        }
    }

    #[test]
    fn runtime_conflict_is_rejected() {
        let a = Action::actuation(
            "a",
            Formula::True,
            vec![
                det(Formula::True, vec![Literal::pos(f(0))]),
                det(Formula::True, vec![Literal::neg(f(0))]),
            ],
        );
        let p = Problem::new("p", "d", names(1), vec![a], InitialBelief::default(), Formula::True).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = p.apply_actuation(&p.actions()[0], &State::new(1), &mut rng).unwrap_err();
        assert!(matches!(err, ModelError::ConflictingEffects { .. }));
    }

    #[test]
    fn sensing_reads_values() {
        let a = Action::sensing("s", Formula::True, vec![f(0), f(1)]);
        let p = Problem::new("p", "d", names(2), vec![a], InitialBelief::default(), Formula::True).unwrap();
        let mut s = State::new(2);
        s.set(f(0), true);
        let o = p.apply_sensing(&p.actions()[0], &s).unwrap();
        assert_eq!(o.value(f(0)), Some(true));
        assert_eq!(o.value(f(1)), Some(false));
    }

    #[test]
    fn stochastic_formula_validation() {
        let o = |p: f64| StochasticOption {
            literals: vec![Literal::pos(f(0))],
            probability: p,
        };
        assert!(StochasticFormula::new(vec![o(0.3), o(0.7)]).is_ok());
        assert!(StochasticFormula::new(vec![o(0.3), o(0.6)]).is_err());
        assert!(StochasticFormula::new(vec![o(0.0), o(1.0)]).is_err());
    }

    #[test]
    fn support_closes_unmentioned_clause_facts() {
        let sf = StochasticFormula::new(vec![
            StochasticOption {
                literals: vec![Literal::pos(f(0))],
                probability: 0.5,
            },
            StochasticOption {
                literals: vec![Literal::pos(f(1))],
                probability: 0.5,
            },
        ])
        .unwrap();
        let sup = sf.support();
        let mut s = State::new(2);
        s.set(f(0), true);
        assert!(sup.eval(&s));
        s.set(f(1), true);
        assert!(!sup.eval(&s));
    }
}

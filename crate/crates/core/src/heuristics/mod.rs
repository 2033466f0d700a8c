//! Delete-relaxation heuristics (single-state and belief-space h_add) and
//! the rollout policies built on them.

mod belief;
mod policy;
mod relaxed;

pub use belief::BeliefScratch;
pub use policy::{
    jointly_applicable, policy_by_name, HaddBeliefPolicy, HaddPolicy, PolicyFactory, PolicyRegistry, PolicyScratch,
    RandomPolicy, RolloutPolicy, SENSE_EPSILON,
};
pub use relaxed::{HeuristicError, HeuristicValue, PlanningGraph, RelaxedTask, SingleScratch};

use crate::model::{Problem, State};

/// One-shot single-state h_add. Compiles the relaxation on every call; hot
/// loops should keep a [`RelaxedTask`] instead.
pub fn hadd_single(p: &Problem, s: &State) -> Result<HeuristicValue, HeuristicError> {
    let t = RelaxedTask::new(p)?;
    Ok(t.hadd_single(s, &mut SingleScratch::default()))
}

/// One-shot belief-space h_add of `s` under `belief` (`s` is added if absent).
pub fn hadd_belief(p: &Problem, s: &State, belief: &[State]) -> Result<HeuristicValue, HeuristicError> {
    let t = RelaxedTask::new(p)?;
    Ok(t.hadd_belief(s, belief, &mut BeliefScratch::default()))
}

impl RelaxedTask {
    pub fn hadd_belief(&self, s: &State, belief: &[State], scratch: &mut BeliefScratch) -> HeuristicValue {
        let mut inits = vec![self.relaxed_state(s)];
        inits.extend(belief.iter().filter(|b| *b != s).map(|b| self.relaxed_state(b)));
        self.hadd_belief_relaxed(&inits, scratch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Action, ActionId, ConditionalEffect, FactId, Formula, Guard, InitialBelief, Literal, StochasticFormula};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eff(lits: &[Literal]) -> ConditionalEffect {
        ConditionalEffect {
            condition: Guard::always(),
            outcome: StochasticFormula::deterministic(lits.to_vec()),
        }
    }

    fn act(name: &str, pre: Formula, adds: &[u32]) -> Action {
        Action::actuation(name, pre, vec![eff(&adds.iter().map(|&f| Literal::pos(FactId(f))).collect::<Vec<_>>())])
    }

    fn atom(i: u32) -> Formula {
        Formula::atom(FactId(i))
    }

    fn state(n: usize, on: &[u32]) -> State {
        let mut s = State::new(n);
        for &f in on {
            s.set(FactId(f), true);
        }
        s
    }

    /// facts a=0, b=1, g=2; x: a -> b, y: b -> g.
    fn chain() -> Problem {
        Problem::new(
            "chain",
            "chain",
            vec!["a".into(), "b".into(), "g".into()],
            vec![act("x", atom(0), &[1]), act("y", atom(1), &[2])],
            InitialBelief {
                known: vec![Literal::pos(FactId(0))],
                ..Default::default()
            },
            atom(2),
        )
        .unwrap()
    }

    #[test]
    fn chain_depths() {
        let p = chain();
        assert_eq!(hadd_single(&p, &state(3, &[0])).unwrap(), HeuristicValue::finite(2));
        assert_eq!(hadd_single(&p, &state(3, &[2])).unwrap(), HeuristicValue::finite(0));
        assert_eq!(hadd_single(&p, &state(3, &[])).unwrap(), HeuristicValue::DEAD_END);
        let t = RelaxedTask::new(&p).unwrap();
        let g = t.graph_of_state(&state(3, &[0]));
        assert_eq!(g.depth(1), Some(1));
        assert_eq!(g.hmax(), HeuristicValue::finite(2));
    }

    #[test]
    fn dead_end_orders_last() {
        assert!(HeuristicValue::DEAD_END > HeuristicValue::finite(u32::MAX - 1));
        assert_eq!(HeuristicValue::DEAD_END.to_string(), "dead-end");
    }

    #[test]
    fn negative_precondition_uses_complement() {
        // z requires not-a and gives g; a is true in s and nothing deletes it.
        let p = Problem::new(
            "neg",
            "neg",
            vec!["a".into(), "g".into()],
            vec![act("z", Formula::not(atom(0)), &[1])],
            InitialBelief::default(),
            atom(1),
        )
        .unwrap();
        assert_eq!(hadd_single(&p, &state(2, &[0])).unwrap(), HeuristicValue::DEAD_END);
        assert_eq!(hadd_single(&p, &state(2, &[])).unwrap(), HeuristicValue::finite(1));
    }

    #[test]
    fn conditional_effects_fire_per_condition() {
        // Parameterless step: (when p0 p1) (when p1 p2) ... ; goal p3.
        let step = Action::actuation(
            "step",
            Formula::True,
            (0..3)
                .map(|i| ConditionalEffect {
                    condition: Guard::new(atom(i)),
                    outcome: StochasticFormula::deterministic(vec![Literal::pos(FactId(i + 1))]),
                })
                .collect(),
        );
        let p = Problem::new(
            "cond",
            "cond",
            (0..4).map(|i| format!("p{i}")).collect(),
            vec![step],
            InitialBelief::default(),
            atom(3),
        )
        .unwrap();
        assert_eq!(hadd_single(&p, &state(4, &[0])).unwrap(), HeuristicValue::finite(3));
    }

    /// Doors fragment. Facts: at-start=0, at-door=1, open=2, at-goal=3.
    /// walk: at-start -> at-door; sense: observes open; pass: at-door & open -> at-goal;
    /// back: at-door -> at-start.
    fn doors_fragment() -> Problem {
        Problem::new(
            "frag",
            "frag",
            vec!["at-start".into(), "at-door".into(), "open".into(), "at-goal".into()],
            vec![
                act("walk", atom(0), &[1]),
                Action::sensing("sense", Formula::True, vec![FactId(2)]),
                act("pass", Formula::and([atom(1), atom(2)]), &[3]),
                act("back", atom(1), &[0]),
            ],
            InitialBelief {
                known: vec![Literal::pos(FactId(0))],
                constraints: vec![Formula::or([atom(2), Formula::not(atom(2))])],
                ..Default::default()
            },
            atom(3),
        )
        .unwrap()
    }

    #[test]
    fn belief_filtering_on_doors_fragment() {
        let p = doors_fragment();
        let t = RelaxedTask::new(&p).unwrap();
        let open = state(4, &[1, 2]);
        let closed = state(4, &[1]);
        let single = t.hadd_single(&open, &mut SingleScratch::default());
        assert_eq!(single, HeuristicValue::finite(1));
        let mut sc = BeliefScratch::default();
        let h = t.hadd_belief(&open, &[open.clone(), closed.clone()], &mut sc);
        // Sensing in layer 1 drops the closed state, so pass is jointly
        // applicable only from layer 2.
        assert_eq!(sc.discarded_at(1), Some(1));
        assert_eq!(h, HeuristicValue::finite(2));
        assert_eq!(t.hadd_belief(&open, &[open.clone()], &mut sc), single);
        // From the start the sensing layer overlaps with walking.
        let open = state(4, &[0, 2]);
        let closed = state(4, &[0]);
        assert_eq!(t.hadd_belief(&open, &[open.clone(), closed], &mut sc), HeuristicValue::finite(2));
    }

    #[test]
    fn belief_goal_already_true() {
        let p = chain();
        let s = state(3, &[2]);
        let s2 = state(3, &[0, 2]);
        assert_eq!(hadd_belief(&p, &s, &[s.clone(), s2]).unwrap(), HeuristicValue::finite(0));
    }

    #[test]
    fn hadd_policy_prefers_progress() {
        let p = chain();
        let pol = HaddPolicy::new(&p).unwrap();
        let s = state(3, &[0]);
        let mut sc = PolicyScratch::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(pol.choose(&p, &s, &[s.clone()], &mut rng, &mut sc), Some(ActionId(0)));
        }
        let s = state(3, &[0, 1]);
        assert_eq!(pol.choose(&p, &s, &[s.clone()], &mut rng, &mut sc), Some(ActionId(1)));
        assert_eq!(pol.choose(&p, &State::new(3), &[State::new(3)], &mut rng, &mut sc), None);
    }

    #[test]
    fn belief_policy_senses_when_it_helps() {
        let p = doors_fragment();
        let pol = HaddBeliefPolicy::new(&p).unwrap();
        let open = state(4, &[1, 2]);
        let closed = state(4, &[1]);
        let mut sc = PolicyScratch::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let a = pol.choose(&p, &open, &[open.clone(), closed.clone()], &mut rng, &mut sc);
            assert_eq!(a, Some(ActionId(1)));
        }
    }

    #[test]
    fn registry_names() {
        let r = PolicyRegistry::default();
        assert_eq!(r.names().collect::<Vec<_>>(), ["random", "hadd", "hadd-belief"]);
        let p = chain();
        assert_eq!(r.build("hadd-belief", &p).unwrap().name(), "hadd-belief");
        assert!(matches!(r.build("ff", &p), Err(HeuristicError::UnknownPolicy(_))));
    }
}

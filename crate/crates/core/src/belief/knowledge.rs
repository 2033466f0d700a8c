use crate::bitset::BitSet;
use crate::model::{Action, FactId, Literal, Observation, Problem};

/// Cached set of literals known to hold at a history node.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Knowledge {
    pos: BitSet,
    neg: BitSet,
}

impl std::fmt::Debug for Knowledge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Knowledge{{+{:?} -{:?}}}", self.pos, self.neg)
    }
}

impl Knowledge {
    pub fn empty(num_facts: usize) -> Self {
        Knowledge {
            pos: BitSet::new(num_facts),
            neg: BitSet::new(num_facts),
        }
    }

    /// Literals fixed by the initial belief.
    pub fn initial(p: &Problem) -> Self {
        let mut k = Knowledge::empty(p.num_facts());
        for f in 0..p.num_facts() {
            let id = FactId(f as u32);
            if let Some(v) = p.initial_value(id) {
                k.insert(Literal { fact: id, positive: v });
            }
        }
        k
    }

    #[inline]
    pub fn value(&self, f: FactId) -> Option<bool> {
        if self.pos.contains(f.index()) {
            Some(true)
        } else if self.neg.contains(f.index()) {
            Some(false)
        } else {
            None
        }
    }

    #[inline]
    pub fn contains(&self, l: Literal) -> bool {
        self.value(l.fact) == Some(l.positive)
    }

    pub fn insert(&mut self, l: Literal) {
        if l.positive {
            self.neg.remove(l.fact.index());
            self.pos.insert(l.fact.index());
        } else {
            self.pos.remove(l.fact.index());
            self.neg.insert(l.fact.index());
        }
    }

    pub fn forget(&mut self, f: FactId) {
        self.pos.remove(f.index());
        self.neg.remove(f.index());
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.pos
            .iter()
            .map(|i| Literal::pos(FactId(i as u32)))
            .chain(self.neg.iter().map(|i| Literal::neg(FactId(i as u32))))
    }

    pub fn len(&self) -> usize {
        self.pos.count() + self.neg.count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Known literals after executing `a` and (when it senses) receiving `obs`.
    ///
    /// A fact stays known when every outcome of every effect that may fire
    /// leaves it at one value; effects whose condition is known to hold and
    /// whose options all agree contribute new literals. Observed values are added.
    pub fn after(&self, a: &Action, obs: Option<&Observation>) -> Knowledge {
        let mut next = self.clone();
        if a.actuates() && !a.effects.is_empty() {
            let value = |f: FactId| self.value(f);
            let mut touched: Vec<FactId> = Vec::new();
            for e in &a.effects {
                if e.condition.formula().partial_eval(&value) == Some(false) {
                    continue;
                }
                for o in &e.outcome.options {
                    for l in &o.literals {
                        if !touched.contains(&l.fact) {
                            touched.push(l.fact);
                        }
                    }
                }
            }
            for f in touched {
                let mut possible: [bool; 2] = [false, false];
                let mut unknown = false;
                let mut always_written = false;
                for e in &a.effects {
                    let cond = e.condition.formula().partial_eval(&value);
                    if cond == Some(false) {
                        continue;
                    }
                    let mut every_option_writes = true;
                    for o in &e.outcome.options {
                        match o.literals.iter().find(|l| l.fact == f) {
                            Some(l) => possible[usize::from(l.positive)] = true,
                            None => every_option_writes = false,
                        }
                    }
                    if cond == Some(true) && every_option_writes {
                        always_written = true;
                    }
                }
                if !always_written {
                    match self.value(f) {
                        Some(v) => possible[usize::from(v)] = true,
                        None => unknown = true,
                    }
                }
                match (unknown, possible) {
                    (false, [true, false]) => next.insert(Literal::neg(f)),
                    (false, [false, true]) => next.insert(Literal::pos(f)),
                    _ => next.forget(f),
                }
            }
        }
        if let Some(o) = obs {
            for l in o.literals() {
                next.insert(l);
            }
        }
        next
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConditionalEffect, Formula, Guard, InitialBelief, StochasticFormula, StochasticOption};

    fn problem(actions: Vec<Action>) -> Problem {
        Problem::new(
            "p",
            "d",
            vec!["a".into(), "b".into(), "c".into()],
            actions,
            InitialBelief {
                known: vec![Literal::pos(FactId(0))],
                constraints: vec![Formula::OneOf(vec![Literal::pos(FactId(1)), Literal::pos(FactId(2))])],
                stochastic: vec![],
            },
            Formula::True,
        )
        .unwrap()
    }

    #[test]
    fn unconditional_effects_are_learned() {
        let a = Action::actuation(
            "x",
            Formula::True,
            vec![ConditionalEffect {
                condition: Guard::always(),
                outcome: StochasticFormula::deterministic(vec![Literal::neg(FactId(0)), Literal::pos(FactId(1))]),
            }],
        );
        let p = problem(vec![a]);
        let k0 = Knowledge::initial(&p);
        assert_eq!(k0.value(FactId(0)), Some(true));
        assert_eq!(k0.value(FactId(1)), None);
        let k1 = k0.after(&p.actions()[0], None);
        assert_eq!(k1.value(FactId(0)), Some(false));
        assert_eq!(k1.value(FactId(1)), Some(true));
        assert_eq!(k1.value(FactId(2)), None);
    }

    #[test]
    fn uncertain_conditional_effect_forgets() {
        let a = Action::actuation(
            "x",
            Formula::True,
            vec![ConditionalEffect {
                condition: Guard::new(Formula::atom(FactId(1))),
                outcome: StochasticFormula::deterministic(vec![Literal::neg(FactId(0))]),
            }],
        );
        let p = problem(vec![a]);
        let k1 = Knowledge::initial(&p).after(&p.actions()[0], None);
        assert_eq!(k1.value(FactId(0)), None);
    }

    #[test]
    fn stochastic_effect_agreeing_options_stay_known() {
        let a = Action::actuation(
            "x",
            Formula::True,
            vec![ConditionalEffect {
                condition: Guard::always(),
                outcome: StochasticFormula::new(vec![
                    StochasticOption {
                        literals: vec![Literal::pos(FactId(0)), Literal::pos(FactId(1))],
                        probability: 0.5,
                    },
                    StochasticOption {
                        literals: vec![Literal::pos(FactId(0))],
                        probability: 0.5,
                    },
                ])
                .unwrap(),
            }],
        );
        let p = problem(vec![a]);
        let k1 = Knowledge::initial(&p).after(&p.actions()[0], None);
        assert_eq!(k1.value(FactId(0)), Some(true));
        assert_eq!(k1.value(FactId(1)), None);
    }

    #[test]
    fn observations_are_added() {
        let s = Action::sensing("s", Formula::True, vec![FactId(1)]);
        let p = problem(vec![s]);
        let mut st = p.base_state().clone();
        st.set(FactId(1), true);
        let o = Observation::of(&[FactId(1)], &st);
        let k1 = Knowledge::initial(&p).after(&p.actions()[0], Some(&o));
        assert_eq!(k1.value(FactId(1)), Some(true));
    }
}

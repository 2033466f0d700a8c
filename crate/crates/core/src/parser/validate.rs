//! Static diagnostics for grounded problems.

use std::fmt;

use crate::belief::sat;
use crate::bitset::BitSet;
use crate::model::{FactId, Formula, Literal, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticKind {
    UnsatisfiablePrecondition,
    UnreachableAction,
    DeadFact,
    HiddenFactNeverSetOrSensed,
    GoalTriviallyTrue,
    GoalUnreachable,
    UnsatisfiableInitialBelief,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{level}: {}", self.message)
    }
}

fn diag(severity: Severity, kind: DiagnosticKind, message: String) -> Diagnostic {
    Diagnostic {
        severity,
        kind,
        message,
    }
}

/// Literal-level relaxed reachability from every possible initial literal.
/// Returns reachable literals as (positive, negative) bit sets.
fn relaxed_literals(p: &Problem) -> (BitSet, BitSet, Vec<bool>) {
    let n = p.num_facts();
    let mut pos = BitSet::new(n);
    let mut neg = BitSet::new(n);
    for f in 0..n {
        match p.initial_value(FactId(f as u32)) {
            Some(true) => {
                pos.insert(f);
            }
            Some(false) => {
                neg.insert(f);
            }
            None => {
                pos.insert(f);
                neg.insert(f);
            }
        }
    }
    let reachable = |pos: &BitSet, neg: &BitSet, f: &Formula| -> bool {
        f.eval_with(&|l: Literal| {
            if l.positive {
                pos.contains(l.fact.index())
            } else {
                neg.contains(l.fact.index())
            }
        })
    };
    let mut fired = vec![false; p.actions().len()];
    loop {
        let mut changed = false;
        for (i, a) in p.actions().iter().enumerate() {
            // Monotone over-approximation: negations inside the formula are
            // read as reachable literals of the opposite polarity.
            if !reachable(&pos, &neg, &a.pre.formula().nnf()) {
                continue;
            }
            if !fired[i] {
                fired[i] = true;
                changed = true;
            }
            for e in &a.effects {
                if !reachable(&pos, &neg, &e.condition.formula().nnf()) {
                    continue;
                }
                for o in &e.outcome.options {
                    for l in &o.literals {
                        let fresh = if l.positive {
                            pos.insert(l.fact.index())
                        } else {
                            neg.insert(l.fact.index())
                        };
                        changed |= fresh;
                    }
                }
            }
        }
        if !changed {
            return (pos, neg, fired);
        }
    }
}

/// Warnings and errors about a grounded problem. Never fails.
pub fn validate(p: &Problem) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = p.num_facts();
    let init = p.initial_formula();
    if !sat::satisfiable(&init, n) {
        out.push(diag(
            Severity::Error,
            DiagnosticKind::UnsatisfiableInitialBelief,
            "the initial belief has no possible state".into(),
        ));
        return out;
    }

    let mut modified = vec![false; n];
    let mut sensed = vec![false; n];
    let mut mentioned = vec![false; n];
    for a in p.actions() {
        a.pre.formula().for_each_literal(&mut |l| mentioned[l.fact.index()] = true);
        for e in &a.effects {
            e.condition.formula().for_each_literal(&mut |l| mentioned[l.fact.index()] = true);
            for o in &e.outcome.options {
                for l in &o.literals {
                    modified[l.fact.index()] = true;
                    mentioned[l.fact.index()] = true;
                }
            }
        }
        for f in &a.observes {
            sensed[f.index()] = true;
            mentioned[f.index()] = true;
        }
    }
    p.goal.formula().for_each_literal(&mut |l| mentioned[l.fact.index()] = true);

    // Facts nobody writes keep their initial value forever.
    let invariant = |f: FactId| {
        if modified[f.index()] {
            None
        } else {
            p.initial_value(f)
        }
    };
    let (pos, neg, fired) = relaxed_literals(p);
    for (i, a) in p.actions().iter().enumerate() {
        let pre = a.pre.formula().assign(&invariant);
        if !sat::satisfiable(&pre, n) {
            out.push(diag(
                Severity::Warning,
                DiagnosticKind::UnsatisfiablePrecondition,
                format!("`{}` has an unsatisfiable precondition", a.name),
            ));
        } else if !fired[i] {
            out.push(diag(
                Severity::Warning,
                DiagnosticKind::UnreachableAction,
                format!("`{}` can never become applicable", a.name),
            ));
        }
    }

    for f in 0..n {
        let id = FactId(f as u32);
        let in_init = p.is_hidden_initially(id) || p.initial_value(id) == Some(true);
        if !mentioned[f] {
            out.push(diag(
                Severity::Warning,
                DiagnosticKind::DeadFact,
                format!(
                    "fact `{}` is never used by an action or the goal{}",
                    p.fact_name(id),
                    if in_init { "" } else { " and is always false" }
                ),
            ));
            continue;
        }
        if p.is_hidden_initially(id) && !modified[f] && !sensed[f] {
            let linked = p
                .initial
                .constraints
                .iter()
                .map(|c| c.facts())
                .chain(p.initial.stochastic.iter().map(|s| s.facts()))
                .filter(|fs| fs.contains(&id))
                .flatten()
                .any(|g| sensed[g.index()] || modified[g.index()]);
            if !linked {
                out.push(diag(
                    Severity::Warning,
                    DiagnosticKind::HiddenFactNeverSetOrSensed,
                    format!("hidden fact `{}` is never set or sensed", p.fact_name(id)),
                ));
            }
        }
    }

    let goal = p.goal.formula();
    if sat::entails_formula(&init, goal, n) {
        out.push(diag(
            Severity::Warning,
            DiagnosticKind::GoalTriviallyTrue,
            "the goal holds in every initial state".into(),
        ));
    } else if !goal.nnf().eval_with(&|l: Literal| {
        if l.positive {
            pos.contains(l.fact.index())
        } else {
            neg.contains(l.fact.index())
        }
    }) {
        out.push(diag(
            Severity::Warning,
            DiagnosticKind::GoalUnreachable,
            "the goal is unreachable even ignoring deletes and uncertainty".into(),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Action, ConditionalEffect, Guard, InitialBelief, StochasticFormula};

    fn lit(i: u32) -> Formula {
        Formula::atom(FactId(i))
    }

    #[test]
    fn contradictory_precondition_and_dead_fact() {
        let bad = Action::actuation(
            "bad",
            Formula::And(vec![lit(0), Formula::not(lit(0))]),
            vec![ConditionalEffect {
                condition: Guard::always(),
                outcome: StochasticFormula::deterministic(vec![Literal::pos(FactId(1))]),
            }],
        );
        let p = Problem::new(
            "p",
            "d",
            vec!["a".into(), "g".into(), "unused".into()],
            vec![bad],
            InitialBelief {
                known: vec![Literal::pos(FactId(0))],
                ..Default::default()
            },
            lit(1),
        )
        .unwrap();
        let ds = validate(&p);
        assert!(ds.iter().any(|d| d.kind == DiagnosticKind::UnsatisfiablePrecondition
            && d.message.contains("unsatisfiable precondition")));
        assert!(ds.iter().any(|d| d.kind == DiagnosticKind::DeadFact && d.message.contains("unused")));
        assert!(ds.iter().any(|d| d.kind == DiagnosticKind::GoalUnreachable));
    }

    #[test]
    fn trivially_true_goal() {
        let p = Problem::new(
            "p",
            "d",
            vec!["a".into()],
            vec![],
            InitialBelief {
                known: vec![Literal::pos(FactId(0))],
                ..Default::default()
            },
            lit(0),
        )
        .unwrap();
        assert!(validate(&p).iter().any(|d| d.kind == DiagnosticKind::GoalTriviallyTrue));
    }
}

//! Regression of formulas through actions, observations and histories.

use crate::model::{Action, FactId, Formula, Literal, Observation};

use super::{BeliefError, Knowledge};

/// `pre(a) ∧ φ` with every literal `l` replaced by `c_{a,l} ∨ (l ∧ ¬c_{a,¬l})`.
pub fn regress_action(phi: &Formula, a: &Action) -> Result<Formula, BeliefError> {
    if !a.is_deterministic() {
        return Err(BeliefError::StochasticAction(a.name.clone()));
    }
    let body = if a.actuates() && !a.effects.is_empty() {
        phi.map_literals(&mut |l: Literal| {
            let achieve = a.achiever_condition(l);
            let destroy = a.achiever_condition(l.negate());
            Formula::or([achieve, Formula::and([Formula::Lit(l), Formula::not(destroy)])])
        })
    } else {
        phi.clone()
    };
    Ok(Formula::and([a.pre.formula().clone(), body]))
}

fn check_observation(a: &Action, o: &Observation) -> Result<(), BeliefError> {
    let mut expected = a.observes.clone();
    expected.sort_unstable();
    expected.dedup();
    let got: Vec<FactId> = o.0.iter().map(|&(f, _)| f).collect();
    if expected != got {
        return Err(BeliefError::ObservationMismatch(a.name.clone()));
    }
    Ok(())
}

/// `rg_a(obs(a)=o → phi)`.
pub fn regress_observation(phi: &Formula, a: &Action, o: &Observation) -> Result<Formula, BeliefError> {
    check_observation(a, o)?;
    let obs = Formula::and(o.literals().map(Formula::Lit));
    regress_action(&Formula::implies(obs, phi.clone()), a)
}

fn regress_step(phi: &Formula, a: &Action, o: Option<&Observation>) -> Result<Formula, BeliefError> {
    match (a.senses(), o) {
        (true, Some(o)) => regress_observation(phi, a, o),
        (false, None) => regress_action(phi, a),
        _ => Err(BeliefError::ObservationMismatch(a.name.clone())),
    }
}

/// Whether `a` may change `f` when executed from a state satisfying `known`.
fn may_modify(a: &Action, f: FactId, known: &Knowledge) -> bool {
    if !a.actuates() {
        return false;
    }
    let value = |g: FactId| known.value(g);
    a.effects.iter().any(|e| {
        e.condition.formula().partial_eval(&value) != Some(false)
            && e.outcome.options.iter().any(|o| o.literals.iter().any(|l| l.fact == f))
    })
}

/// Regress `φ` (about the state after the last step) back to the initial state.
///
/// `known[i]` is the forward knowledge before step `i`, with one extra entry for
/// the final state. Forward-known values are substituted directly. Values
/// revealed by later observations and untouched since are substituted under a
/// guard `¬l ∨ φ[l:=⊤]`, which is exact for every initial state that is
/// consistent with the applicable history.
pub fn regress_path(
    phi: &Formula,
    steps: &[(&Action, Option<&Observation>)],
    known: &[&Knowledge],
) -> Result<Formula, BeliefError> {
    debug_assert_eq!(known.len(), steps.len() + 1);
    let n = steps.len();
    let mut cur = {
        let k = known[n];
        phi.assign(&|f: FactId| k.value(f))
    };
    let mut learned: Vec<Literal> = Vec::new();
    for i in (0..n).rev() {
        let (a, o) = steps[i];
        cur = regress_step(&cur, a, o)?;
        if let Some(o) = o {
            for l in o.literals() {
                learned.retain(|m| m.fact != l.fact);
                learned.push(l);
            }
        }
        let k = known[i];
        learned.retain(|l| !may_modify(a, l.fact, k));
        cur = cur.assign(&|f: FactId| k.value(f));
        if !learned.is_empty() {
            let mentioned = cur.facts();
            let relevant: Vec<Literal> = learned
                .iter()
                .copied()
                .filter(|l| mentioned.binary_search(&l.fact).is_ok())
                .collect();
            if !relevant.is_empty() {
                let substituted = cur.assign(&|f: FactId| {
                    relevant.iter().find(|l| l.fact == f).map(|l| l.positive)
                });
                cur = Formula::or([
                    Formula::not(Formula::conjunction_of(&relevant)),
                    substituted,
                ]);
            }
        }
        if cur == Formula::False {
            break;
        }
    }
    Ok(cur)
}

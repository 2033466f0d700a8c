//! Random problem generators and brute-force oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use contingent_pomcp::model::{
    Action, ConditionalEffect, FactId, Formula, Guard, InitialBelief, Literal, Problem, State, StochasticFormula,
    StochasticOption,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn lit<R: Rng>(rng: &mut R, facts: &[u32], neg_prob: f64) -> Literal {
    let f = FactId(*facts.choose(rng).unwrap());
    if rng.gen_bool(neg_prob) {
        Literal::neg(f)
    } else {
        Literal::pos(f)
    }
}

/// Up to `k` literals over distinct facts.
pub fn lits<R: Rng>(rng: &mut R, n: u32, k: usize, neg_prob: f64) -> Vec<Literal> {
    let all: Vec<u32> = (0..n).collect();
    all.choose_multiple(rng, k.min(n as usize))
        .map(|&f| lit(rng, &[f], neg_prob))
        .collect()
}

pub fn random_state<R: Rng>(rng: &mut R, n: u32) -> State {
    let mut s = State::new(n as usize);
    for f in 0..n {
        s.set(FactId(f), rng.gen_bool(0.5));
    }
    s
}

/// Random formula of bounded depth over facts `0..n`.
pub fn random_formula<R: Rng>(rng: &mut R, n: u32, depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return Formula::lit(lit(rng, &(0..n).collect::<Vec<_>>(), 0.4));
    }
    match rng.gen_range(0..3) {
        0 => Formula::and((0..rng.gen_range(2..=3)).map(|_| random_formula(rng, n, depth - 1))),
        1 => Formula::or((0..rng.gen_range(2..=3)).map(|_| random_formula(rng, n, depth - 1))),
        _ => Formula::not(random_formula(rng, n, depth - 1)),
    }
}

/// Effects of one action: each touches its own facts, so no two effects of
/// an action can conflict.
fn effects<R: Rng>(rng: &mut R, n: u32, stochastic: bool) -> Vec<ConditionalEffect> {
    let mut free: Vec<u32> = (0..n).collect();
    free.shuffle(rng);
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        if free.len() < 2 {
            break;
        }
        let k = rng.gen_range(1..=2.min(free.len()));
        let mine: Vec<u32> = free.drain(..k).collect();
        let condition = if rng.gen_bool(0.5) {
            Guard::always()
        } else {
            Guard::new(Formula::conjunction_of(&{ let k = rng.gen_range(1..=2); lits(rng, n, k, 0.3) }))
        };
        let option = |rng: &mut R| -> Vec<Literal> { mine.iter().map(|&f| lit(rng, &[f], 0.3)).collect() };
        let outcome = if stochastic && rng.gen_bool(0.5) {
            let p = rng.gen_range(1..10) as f64 / 10.0;
            StochasticFormula::new(vec![
                StochasticOption {
                    literals: option(rng),
                    probability: p,
                },
                StochasticOption {
                    literals: option(rng),
                    probability: 1.0 - p,
                },
            ])
            .unwrap()
        } else {
            StochasticFormula::deterministic(option(rng))
        };
        out.push(ConditionalEffect { condition, outcome });
    }
    out
}

/// Problem for heuristic checks: conjunctive preconditions and conditions,
/// optional stochastic effects, some sensing actions, goal a disjunction of
/// conjunctions. Returns the goal terms too.
pub fn random_relaxed_problem<R: Rng>(rng: &mut R) -> (Problem, Vec<Vec<Literal>>) {
    let n = rng.gen_range(4..=12u32);
    let m = rng.gen_range(3..=10usize);
    let mut actions = Vec::new();
    for i in 0..m {
        let pre = Formula::conjunction_of(&{ let k = rng.gen_range(0..=3); lits(rng, n, k, 0.3) });
        if rng.gen_bool(0.15) {
            actions.push(Action::sensing(format!("s{i}"), pre, vec![FactId(rng.gen_range(0..n))]));
        } else {
            actions.push(Action::actuation(format!("a{i}"), pre, effects(rng, n, true)));
        }
    }
    let terms: Vec<Vec<Literal>> = (0..rng.gen_range(1..=2))
        .map(|_| { let k = rng.gen_range(1..=3); lits(rng, n, k, 0.25) })
        .collect();
    let goal = Formula::or(terms.iter().map(|t| Formula::conjunction_of(t)));
    let facts = (0..n).map(|i| format!("f{i}")).collect();
    let p = Problem::new("rnd", "rnd", facts, actions, InitialBelief::default(), goal).unwrap();
    (p, terms)
}

/// Layered delete-relaxation fixpoint over explicit literal sets. Returns
/// the first layer of every reachable literal.
pub fn relaxed_depths(p: &Problem, s: &State) -> HashMap<Literal, u32> {
    let n = p.num_facts();
    let mut depth: HashMap<Literal, u32> = HashMap::new();
    for f in 0..n as u32 {
        let f = FactId(f);
        depth.insert(if s.get(f) { Literal::pos(f) } else { Literal::neg(f) }, 0);
    }
    let holds = |d: &HashMap<Literal, u32>, c: &Formula| {
        c.conjunctive_literals()
            .expect("oracle instances use conjunctions")
            .iter()
            .all(|l| d.contains_key(l))
    };
    let mut layer = 0;
    loop {
        let mut added = Vec::new();
        for id in p.action_ids() {
            let a = p.action(id);
            if !holds(&depth, a.pre.formula()) {
                continue;
            }
            for e in &a.effects {
                if !holds(&depth, e.condition.formula()) {
                    continue;
                }
                for o in &e.outcome.options {
                    for &l in &o.literals {
                        if !depth.contains_key(&l) {
                            added.push(l);
                        }
                    }
                }
            }
        }
        if added.is_empty() {
            return depth;
        }
        layer += 1;
        for l in added {
            depth.entry(l).or_insert(layer);
        }
    }
}

/// (h_add, h_max) from the oracle depths; `None` is a dead end.
pub fn oracle_h(depth: &HashMap<Literal, u32>, terms: &[Vec<Literal>]) -> (Option<u32>, Option<u32>) {
    let mut add: Option<u32> = None;
    let mut max: Option<u32> = None;
    for t in terms {
        let ds: Option<Vec<u32>> = t.iter().map(|l| depth.get(l).copied()).collect();
        if let Some(ds) = ds {
            let sum = ds.iter().sum::<u32>();
            let mx = ds.iter().copied().max().unwrap_or(0);
            add = Some(add.map_or(sum, |a| a.min(sum)));
            max = Some(max.map_or(mx, |m| m.min(mx)));
        }
    }
    (add, max)
}

/// Deterministic problem with hidden facts under oneof/or constraints, for
/// regression checks. Returns the problem and the hidden facts.
pub fn random_contingent_problem<R: Rng>(rng: &mut R) -> Problem {
    let n = rng.gen_range(3..=10u32);
    let mut order: Vec<u32> = (0..n).collect();
    order.shuffle(rng);
    let h = rng.gen_range(2..=4.min(n as usize));
    let hidden: Vec<u32> = order[..h].to_vec();
    let mut constraints = Vec::new();
    let k = rng.gen_range(2..=h);
    constraints.push(Formula::OneOf(hidden[..k].iter().map(|&f| Literal::pos(FactId(f))).collect()));
    if rng.gen_bool(0.5) {
        let clause: Vec<Formula> = (0..2).map(|_| Formula::lit(lit(rng, &hidden, 0.5))).collect();
        constraints.push(Formula::or(clause));
    }
    let known: Vec<Literal> = order[h..]
        .iter()
        .copied()
        .collect::<Vec<u32>>()
        .into_iter()
        .filter_map(|f| rng.gen_bool(0.5).then(|| lit(rng, &[f], 0.3)))
        .collect();
    let mut actions = Vec::new();
    for i in 0..rng.gen_range(3..=7) {
        let pre = Formula::conjunction_of(&{ let k = rng.gen_range(0..=2); lits(rng, n, k, 0.3) });
        match rng.gen_range(0..4) {
            0 => actions.push(Action::sensing(format!("s{i}"), pre, vec![FactId(*hidden.choose(rng).unwrap())])),
            1 => actions.push(Action::sensing(format!("s{i}"), pre, vec![FactId(rng.gen_range(0..n))])),
            _ => actions.push(Action::actuation(format!("a{i}"), pre, effects(rng, n, false))),
        }
    }
    let facts = (0..n).map(|i| format!("f{i}")).collect();
    let initial = InitialBelief {
        known,
        constraints,
        stochastic: vec![],
    };
    Problem::new("rnd", "rnd", facts, actions, initial, Formula::atom(FactId(0))).unwrap()
}

/// Every initial state of a problem without stochastic clauses: known
/// literals hold, constrained facts range freely subject to the
/// constraints, every other fact is false.
pub fn enumerate_initial(p: &Problem) -> Vec<State> {
    let n = p.num_facts();
    let init = &p.initial;
    let mut hidden = vec![false; n];
    for c in &init.constraints {
        for f in c.facts() {
            hidden[f.index()] = true;
        }
    }
    let mut out = Vec::new();
    for bits in 0u32..(1 << n) {
        let mut s = State::new(n);
        for f in 0..n {
            s.set(FactId(f as u32), bits >> f & 1 == 1);
        }
        let free_ok = (0..n).all(|f| {
            let fid = FactId(f as u32);
            hidden[f] || init.known.iter().any(|l| l.fact == fid) || !s.get(fid)
        });
        if free_ok && init.known.iter().all(|l| l.holds_in(&s)) && init.constraints.iter().all(|c| c.eval(&s)) {
            out.push(s);
        }
    }
    out
}

//! Sampling initial states from the known literals, the uniform constraints
//! and the independent stochastic clauses of the initial belief.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{FactId, Formula, Problem, State, StochasticFormula};

use super::BeliefError;

/// Largest number of models enumerated for exact uniform sampling.
const MODEL_CAP: usize = 4096;
/// Redraws of the stochastic clauses of a component before giving up.
const CLAUSE_RETRIES: usize = 1000;

#[derive(Debug, Clone)]
struct Component {
    /// Hidden facts not governed by a stochastic clause.
    free: Vec<FactId>,
    constraints: Vec<Formula>,
    /// For each free fact, indices of constraints that mention it.
    watch: Vec<Vec<usize>>,
    stochastic: Vec<usize>,
    /// Precomputed models over `free` when the component has no stochastic clause.
    models: Option<Vec<Vec<bool>>>,
}

#[derive(Debug, Clone)]
pub struct InitialSampler {
    base: State,
    stochastic: Vec<(StochasticFormula, Vec<FactId>)>,
    components: Vec<Component>,
    num_facts: usize,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

struct CapExceeded;

impl Component {
    /// Enumerate models of the free facts given the values already in `s`.
    fn enumerate(&self, s: &mut State, pending: &mut [bool], cap: usize) -> Result<Vec<Vec<bool>>, CapExceeded> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.free.len());
        self.enumerate_rec(s, pending, &mut cur, &mut out, cap)?;
        Ok(out)
    }

    fn consistent(&self, i: usize, s: &State, pending: &[bool]) -> bool {
        let value = |f: FactId| {
            if pending[f.index()] {
                None
            } else {
                Some(s.get(f))
            }
        };
        self.watch[i]
            .iter()
            .all(|&c| self.constraints[c].partial_eval(&value) != Some(false))
    }

    fn enumerate_rec(
        &self,
        s: &mut State,
        pending: &mut [bool],
        cur: &mut Vec<bool>,
        out: &mut Vec<Vec<bool>>,
        cap: usize,
    ) -> Result<(), CapExceeded> {
        let i = cur.len();
        if i == self.free.len() {
            if out.len() >= cap {
                return Err(CapExceeded);
            }
            out.push(cur.clone());
            return Ok(());
        }
        let f = self.free[i];
        pending[f.index()] = false;
        for v in [false, true] {
            s.set(f, v);
            if self.consistent(i, s, pending) {
                cur.push(v);
                let r = self.enumerate_rec(s, pending, cur, out, cap);
                cur.pop();
                if r.is_err() {
                    pending[f.index()] = true;
                    return r;
                }
            }
        }
        pending[f.index()] = true;
        Ok(())
    }

    /// Depth-first search with random value order; returns the first model.
    fn random_model<R: Rng + ?Sized>(&self, s: &mut State, pending: &mut [bool], i: usize, rng: &mut R) -> bool {
        if i == self.free.len() {
            return true;
        }
        let f = self.free[i];
        pending[f.index()] = false;
        let first: bool = rng.gen();
        for v in [first, !first] {
            s.set(f, v);
            if self.consistent(i, s, pending) && self.random_model(s, pending, i + 1, rng) {
                return true;
            }
        }
        pending[f.index()] = true;
        false
    }

    /// Constraints hold once all free facts are set (covers constraints over
    /// stochastic facts only).
    fn satisfied(&self, s: &State) -> bool {
        self.constraints.iter().all(|c| c.eval(s))
    }
}

impl InitialSampler {
    pub fn new(p: &Problem) -> Result<Self, BeliefError> {
        let n = p.num_facts();
        let mut parent: Vec<usize> = (0..n).collect();
        let link = |parent: &mut Vec<usize>, facts: &[FactId]| {
            for w in facts.windows(2) {
                union(parent, w[0].index(), w[1].index());
            }
        };
        for c in &p.initial.constraints {
            link(&mut parent, &c.facts());
        }
        let stochastic: Vec<(StochasticFormula, Vec<FactId>)> = p
            .initial
            .stochastic
            .iter()
            .map(|sf| (sf.clone(), sf.facts()))
            .collect();
        for (_, facts) in &stochastic {
            link(&mut parent, facts);
        }
        let mut governed = vec![false; n];
        for (_, facts) in &stochastic {
            facts.iter().for_each(|f| governed[f.index()] = true);
        }

        let mut roots: Vec<usize> = Vec::new();
        let mut comp_of = vec![usize::MAX; n];
        for f in p.hidden_facts().iter() {
            let r = find(&mut parent, f);
            let ci = match roots.iter().position(|&x| x == r) {
                Some(ci) => ci,
                None => {
                    roots.push(r);
                    roots.len() - 1
                }
            };
            comp_of[f] = ci;
        }
        let mut components: Vec<Component> = roots
            .iter()
            .map(|_| Component {
                free: Vec::new(),
                constraints: Vec::new(),
                watch: Vec::new(),
                stochastic: Vec::new(),
                models: None,
            })
            .collect();
        for f in p.hidden_facts().iter() {
            if !governed[f] {
                components[comp_of[f]].free.push(FactId(f as u32));
            }
        }
        for c in &p.initial.constraints {
            if let Some(f) = c.facts().first() {
                components[comp_of[f.index()]].constraints.push(c.clone());
            }
        }
        for (i, (_, facts)) in stochastic.iter().enumerate() {
            if let Some(f) = facts.first() {
                components[comp_of[f.index()]].stochastic.push(i);
            }
        }
        for comp in components.iter_mut() {
            let mut watch = vec![Vec::new(); comp.free.len()];
            for (ci, c) in comp.constraints.iter().enumerate() {
                let facts = c.facts();
                for (i, f) in comp.free.iter().enumerate() {
                    if facts.binary_search(f).is_ok() {
                        watch[i].push(ci);
                    }
                }
            }
            comp.watch = watch;
        }

        let mut sampler = InitialSampler {
            base: p.base_state().clone(),
            stochastic,
            components,
            num_facts: n,
        };
        let mut pending = vec![false; n];
        for ci in 0..sampler.components.len() {
            let comp = &sampler.components[ci];
            if !comp.stochastic.is_empty() {
                continue;
            }
            let mut s = sampler.base.clone();
            for f in &comp.free {
                pending[f.index()] = true;
            }
            let models = match comp.enumerate(&mut s, &mut pending, MODEL_CAP) {
                Ok(m) => {
                    if m.is_empty() {
                        return Err(BeliefError::UnsatisfiableInitial);
                    }
                    Some(m)
                }
                Err(_) => None,
            };
            for f in &comp.free {
                pending[f.index()] = false;
            }
            sampler.components[ci].models = models;
        }
        Ok(sampler)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<State, BeliefError> {
        let mut s = self.base.clone();
        let mut pending = vec![false; self.num_facts];
        for comp in &self.components {
            if let Some(models) = &comp.models {
                let m = models.choose(rng).expect("models are nonempty");
                for (f, &v) in comp.free.iter().zip(m) {
                    s.set(*f, v);
                }
                continue;
            }
            let mut done = false;
            for _ in 0..CLAUSE_RETRIES {
                for &si in &comp.stochastic {
                    let (sf, facts) = &self.stochastic[si];
                    for &f in facts {
                        s.set(f, false);
                    }
                    for &l in &sf.sample(rng).literals {
                        s.apply(l);
                    }
                }
                for f in &comp.free {
                    pending[f.index()] = true;
                }
                let ok = match comp.enumerate(&mut s, &mut pending, MODEL_CAP) {
                    Ok(models) => match models.choose(rng) {
                        Some(m) => {
                            for (f, &v) in comp.free.iter().zip(m) {
                                s.set(*f, v);
                            }
                            true
                        }
                        None => false,
                    },
                    Err(_) => comp.random_model(&mut s, &mut pending, 0, rng),
                };
                for f in &comp.free {
                    pending[f.index()] = false;
                }
                if ok && comp.satisfied(&s) {
                    done = true;
                    break;
                }
            }
            if !done {
                return Err(BeliefError::UnsatisfiableInitial);
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{InitialBelief, Literal, StochasticOption};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(i: u32) -> FactId {
        FactId(i)
    }

    fn problem(initial: InitialBelief, n: usize) -> Problem {
        Problem::new("p", "d", (0..n).map(|i| format!("f{i}")).collect(), vec![], initial, Formula::True).unwrap()
    }

    #[test]
    fn fully_known_is_deterministic() {
        let p = problem(
            InitialBelief {
                known: vec![Literal::pos(f(1))],
                ..Default::default()
            },
            2,
        );
        let s = InitialSampler::new(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(&s.sample(&mut rng).unwrap(), p.base_state());
        }
    }

    #[test]
    fn oneof_is_uniform() {
        let p = problem(
            InitialBelief {
                constraints: vec![Formula::OneOf(vec![Literal::pos(f(0)), Literal::pos(f(1))])],
                ..Default::default()
            },
            2,
        );
        let s = InitialSampler::new(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let hits = (0..10_000).filter(|_| s.sample(&mut rng).unwrap().get(f(0))).count();
        assert!((hits as f64 / 10_000.0 - 0.5).abs() < 0.02);
    }

    #[test]
    fn stochastic_clause_with_tied_fact() {
        // pr(f0)=0.2, pr(f1)=0.8; constraint f2 <-> f0.
        let sf = StochasticFormula::new(vec![
            StochasticOption {
                literals: vec![Literal::pos(f(0))],
                probability: 0.2,
            },
            StochasticOption {
                literals: vec![Literal::pos(f(1))],
                probability: 0.8,
            },
        ])
        .unwrap();
        let tie = Formula::and([
            Formula::or([Formula::not(Formula::atom(f(2))), Formula::atom(f(0))]),
            Formula::or([Formula::atom(f(2)), Formula::not(Formula::atom(f(0)))]),
        ]);
        let p = problem(
            InitialBelief {
                constraints: vec![tie.clone()],
                stochastic: vec![sf],
                ..Default::default()
            },
            3,
        );
        let s = InitialSampler::new(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut hits = 0;
        for _ in 0..10_000 {
            let st = s.sample(&mut rng).unwrap();
            assert!(tie.eval(&st));
            assert!(st.get(f(0)) != st.get(f(1)));
            hits += usize::from(st.get(f(0)));
        }
        assert!((hits as f64 / 10_000.0 - 0.2).abs() < 0.02);
    }

    #[test]
    fn unsatisfiable_constraints_are_reported() {
        let p = problem(
            InitialBelief {
                constraints: vec![
                    Formula::OneOf(vec![Literal::pos(f(0)), Literal::pos(f(1))]),
                    Formula::and([Formula::atom(f(0)), Formula::atom(f(1))]),
                ],
                ..Default::default()
            },
            2,
        );
        assert!(matches!(InitialSampler::new(&p), Err(BeliefError::UnsatisfiableInitial)));
    }
}

mod common;

use contingent_pomcp::belief::{regress_history, BeliefContext, History, HistoryStep};
use contingent_pomcp::domains::{build, DomainSpec, Family};
use contingent_pomcp::heuristics::{hadd_belief, hadd_single, HeuristicValue, PolicyRegistry, RelaxedTask};
use contingent_pomcp::model::State;
use contingent_pomcp::pomcp::{run_episode_with, Budget, Planner, SearchConfig};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

/// Random deterministic history over an enumerated belief; returns the
/// history and the forward belief after it.
fn random_history(p: &contingent_pomcp::model::Problem, rng: &mut ChaCha8Rng) -> (History, Vec<State>) {
    let mut belief = enumerate_initial(p);
    let mut h = History::new(p);
    let ids: Vec<_> = p.action_ids().collect();
    for _ in 0..rng.gen_range(0..=5) {
        let mut order = ids.clone();
        order.shuffle(rng);
        let Some(&id) = order.iter().find(|&&a| belief.iter().all(|s| p.action(a).pre.holds(s))) else {
            break;
        };
        let a = p.action(id);
        let (_, obs) = p.step(a, belief.choose(rng).unwrap(), rng).unwrap();
        let mut next = Vec::new();
        for s in &belief {
            let (t, o) = p.step(a, s, rng).unwrap();
            if o == obs && !next.contains(&t) {
                next.push(t);
            }
        }
        belief = next;
        h.push(p, HistoryStep { action: id, observation: obs }).unwrap();
    }
    (h, belief)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hadd_matches_layered_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, terms) = random_relaxed_problem(&mut rng);
        let s = random_state(&mut rng, p.num_facts() as u32);
        let (add, _) = oracle_h(&relaxed_depths(&p, &s), &terms);
        let want = add.map_or(HeuristicValue::DEAD_END, HeuristicValue::finite);
        prop_assert_eq!(hadd_single(&p, &s).unwrap(), want);
    }

    #[test]
    fn hmax_bounds_hadd_and_singletons_reduce(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, _) = random_relaxed_problem(&mut rng);
        let t = RelaxedTask::new(&p).unwrap();
        let s = random_state(&mut rng, p.num_facts() as u32);
        let g = t.graph_of_state(&s);
        prop_assert!(g.hmax() <= g.hadd());
        prop_assert_eq!(hadd_belief(&p, &s, &[s.clone()]).unwrap(), hadd_single(&p, &s).unwrap());
    }

    #[test]
    fn belief_h_is_at_least_single_h(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, _) = random_relaxed_problem(&mut rng);
        let n = p.num_facts() as u32;
        let s = random_state(&mut rng, n);
        let others: Vec<State> = (0..rng.gen_range(1..4)).map(|_| random_state(&mut rng, n)).collect();
        prop_assert!(hadd_belief(&p, &s, &others).unwrap() >= hadd_single(&p, &s).unwrap());
    }

    #[test]
    fn regression_agrees_with_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_contingent_problem(&mut rng);
        let ctx = BeliefContext::new(&p).unwrap();
        let (h, belief) = random_history(&p, &mut rng);
        for _ in 0..5 {
            let psi = random_formula(&mut rng, p.num_facts() as u32, 3);
            let truth = belief.iter().all(|s| psi.eval(s));
            prop_assert_eq!(ctx.entails(&regress_history(&p, &psi, &h).unwrap()), truth);
        }
    }

    #[test]
    fn known_literals_hold_in_every_belief_state(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_contingent_problem(&mut rng);
        let (h, belief) = random_history(&p, &mut rng);
        for l in h.last_known().literals() {
            prop_assert!(belief.iter().all(|s| l.holds_in(s)), "{:?}", l);
        }
    }

    #[test]
    fn particles_lie_in_the_belief(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_contingent_problem(&mut rng);
        let ctx = BeliefContext::new(&p).unwrap();
        let (h, belief) = random_history(&p, &mut rng);
        for s in ctx.particles(&h, 20, &mut rng).unwrap() {
            prop_assert!(belief.contains(&s));
        }
    }

    #[test]
    fn chosen_action_is_applicable_in_every_particle(seed in 0u64..1000, family in 0usize..6) {
        let f = Family::ALL[family];
        let p = build(&DomainSpec::new(f, *f.sizes().start())).unwrap();
        let cfg = SearchConfig { budget: Budget::Simulations(100), ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut planner = Planner::new(&p, cfg, &mut rng).unwrap();
        let r = planner.search(&mut rng).unwrap();
        let pre = &p.action(r.action).pre;
        prop_assert!(planner.particles().iter().all(|s| pre.holds(s)));
        prop_assert!(r.root_value >= 0.0);
        prop_assert!(r.actions.iter().filter(|a| a.count > 0).all(|a| a.value >= 1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn episodes_are_reproducible(seed in any::<u64>()) {
        let p = build(&DomainSpec::new(Family::Wumpus, 3)).unwrap();
        let cfg = SearchConfig { budget: Budget::Simulations(100), ..Default::default() };
        let reg = PolicyRegistry::default();
        let a = run_episode_with(&p, &cfg, &reg, seed, 100, false);
        let b = run_episode_with(&p, &cfg, &reg, seed, 100, false);
        prop_assert_eq!(a, b);
    }
}

//! Belief-space h_add: one fact-layer family per state, joint applicability
//! across surviving states, and observation filtering against the reference
//! state `s` (always index 0).

use crate::bitset::BitSet;

use super::relaxed::{goal_sum, HeuristicValue, RelaxedTask, UNREACHED};

/// Reusable buffers for belief-space evaluation. Per-state arrays are laid
/// out state-major with a fixed stride.
#[derive(Debug, Clone, Default)]
pub struct BeliefScratch {
    depth: Vec<u32>,
    disj_cnt: Vec<u32>,
    unit_cnt: Vec<u32>,
    pre_sat: Vec<bool>,
    fired: Vec<bool>,
    frontier: Vec<Vec<u32>>,
    ready: Vec<Vec<u32>>,
    alive: Vec<bool>,
    sat_count: Vec<u32>,
    enabled: Vec<bool>,
    newly_enabled: Vec<u32>,
    /// Layer at which each state was discarded (`UNREACHED` while alive).
    discarded_at: Vec<u32>,
}

impl BeliefScratch {
    fn reset(&mut self, t: &RelaxedTask, k: usize) {
        let nf = t.num_relaxed_facts();
        let na = t.num_actions();
        self.depth.clear();
        self.depth.resize(nf * k, UNREACHED);
        self.disj_cnt.clear();
        for _ in 0..k {
            self.disj_cnt.extend_from_slice(&t.disj_size);
        }
        self.unit_cnt.clear();
        for _ in 0..k {
            self.unit_cnt.extend_from_slice(&t.unit_size);
        }
        self.pre_sat.clear();
        self.pre_sat.resize(na * k, false);
        self.fired.clear();
        self.fired.resize(t.unit_size.len() * k, false);
        self.frontier.resize_with(k.max(self.frontier.len()), Vec::new);
        self.ready.resize_with(k.max(self.ready.len()), Vec::new);
        for v in self.frontier.iter_mut().chain(self.ready.iter_mut()) {
            v.clear();
        }
        self.alive.clear();
        self.alive.resize(k, true);
        self.sat_count.clear();
        self.sat_count.resize(na, 0);
        self.enabled.clear();
        self.enabled.resize(na, false);
        self.newly_enabled.clear();
        self.discarded_at.clear();
        self.discarded_at.resize(k, UNREACHED);
    }

    /// Depth of relaxed fact `f` in the layer family of state `k` from the
    /// last evaluation.
    pub fn depth(&self, k: usize, num_relaxed: usize, f: u32) -> Option<u32> {
        let d = self.depth[k * num_relaxed + f as usize];
        (d != UNREACHED).then_some(d)
    }

    /// Whether state `k` was discarded in the last evaluation, and at which layer.
    pub fn discarded_at(&self, k: usize) -> Option<u32> {
        let d = self.discarded_at[k];
        (d != UNREACHED).then_some(d)
    }
}

impl RelaxedTask {
    /// Belief-space h_add over relaxed initial fact sets. `inits[0]` is the
    /// reference state; the others form the rest of the belief.
    pub fn hadd_belief_relaxed(&self, inits: &[BitSet], sc: &mut BeliefScratch) -> HeuristicValue {
        assert!(!inits.is_empty(), "belief must contain the reference state");
        let k = inits.len();
        let nf = self.num_relaxed_facts();
        let na = self.num_actions();
        let nd = self.disj_size.len();
        let nu = self.unit_size.len();
        sc.reset(self, k);
        let mut alive_count = k as u32;

        for (st, init) in inits.iter().enumerate() {
            for f in init.iter() {
                sc.depth[st * nf + f] = 0;
                sc.frontier[st].push(f as u32);
            }
            for (d, &size) in self.disj_size.iter().enumerate() {
                let a = self.disj_action[d] as usize;
                if size == 0 && !sc.pre_sat[st * na + a] {
                    sc.pre_sat[st * na + a] = true;
                    sc.sat_count[a] += 1;
                }
            }
        }

        let mut layer = 0u32;
        loop {
            layer += 1;
            debug_assert!(
                layer as usize <= nf + k + 1,
                "belief graph exceeded its fixpoint bound"
            );
            // Counters see the facts added in the previous layer.
            for st in 0..k {
                if !sc.alive[st] {
                    continue;
                }
                let frontier = std::mem::take(&mut sc.frontier[st]);
                for &f in &frontier {
                    for &d in self.disj_watch.get(f as usize) {
                        let c = &mut sc.disj_cnt[st * nd + d as usize];
                        *c -= 1;
                        if *c == 0 {
                            let a = self.disj_action[d as usize] as usize;
                            if !sc.pre_sat[st * na + a] {
                                sc.pre_sat[st * na + a] = true;
                                sc.sat_count[a] += 1;
                            }
                        }
                    }
                    for &u in self.unit_watch.get(f as usize) {
                        let c = &mut sc.unit_cnt[st * nu + u as usize];
                        *c -= 1;
                        if *c == 0 && sc.enabled[self.unit_action[u as usize] as usize] {
                            sc.ready[st].push(u);
                        }
                    }
                }
                sc.frontier[st] = frontier;
                sc.frontier[st].clear();
            }

            // action_i: precondition holds in layer i-1 of every surviving state.
            for a in 0..na {
                if !sc.enabled[a] && sc.sat_count[a] == alive_count {
                    sc.enabled[a] = true;
                    sc.newly_enabled.push(a as u32);
                }
            }

            // Sensing actions applicable in every surviving state filter the
            // belief by the observed values in layer i-1.
            let mut discarded = false;
            for a in 0..na {
                let obs = self.observes.get(a);
                if obs.is_empty() || sc.sat_count[a] != alive_count {
                    continue;
                }
                for st in 1..k {
                    if !sc.alive[st] {
                        continue;
                    }
                    let differs = obs.iter().any(|&f| {
                        (sc.depth[f as usize] != UNREACHED) != (sc.depth[st * nf + f as usize] != UNREACHED)
                    });
                    if differs {
                        sc.alive[st] = false;
                        sc.discarded_at[st] = layer;
                        alive_count -= 1;
                        discarded = true;
                        for b in 0..na {
                            if sc.pre_sat[st * na + b] {
                                sc.sat_count[b] -= 1;
                            }
                        }
                    }
                }
            }

            // Fire units of enabled actions whose condition holds.
            let mut grew = false;
            for st in 0..k {
                if !sc.alive[st] {
                    continue;
                }
                for &a in &sc.newly_enabled {
                    for &u in self.action_units.get(a as usize) {
                        if sc.unit_cnt[st * nu + u as usize] == 0 {
                            sc.ready[st].push(u);
                        }
                    }
                }
                let ready = std::mem::take(&mut sc.ready[st]);
                for &u in &ready {
                    let fired = &mut sc.fired[st * nu + u as usize];
                    if *fired {
                        continue;
                    }
                    *fired = true;
                    for &f in self.unit_adds.get(u as usize) {
                        let d = &mut sc.depth[st * nf + f as usize];
                        if *d == UNREACHED {
                            *d = layer;
                            sc.frontier[st].push(f);
                            grew = true;
                        }
                    }
                }
                sc.ready[st] = ready;
                sc.ready[st].clear();
            }
            sc.newly_enabled.clear();

            if !discarded && !grew {
                break;
            }
        }
        goal_sum(&self.goal_terms, &sc.depth[..nf])
    }
}

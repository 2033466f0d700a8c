//! Non-grid families: blocks, unix, medpks.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::geometric_prior;

type Config = Vec<Vec<u32>>;

fn block(i: u32) -> String {
    format!("b{i}")
}

/// Random towers over blocks 1..=k, each tower listed bottom to top.
fn random_config(k: u32, rng: &mut ChaCha8Rng) -> Config {
    let mut order: Vec<u32> = (1..=k).collect();
    order.shuffle(rng);
    let mut towers: Config = Vec::new();
    for b in order {
        if towers.is_empty() || rng.gen_bool(0.4) {
            towers.push(vec![b]);
        } else {
            let t = rng.gen_range(0..towers.len());
            towers[t].push(b);
        }
    }
    towers.sort();
    towers
}

fn config_literals(c: &Config) -> String {
    let mut out = Vec::new();
    for t in c {
        out.push(format!("(ontable {})", block(t[0])));
        for w in t.windows(2) {
            out.push(format!("(on {} {})", block(w[1]), block(w[0])));
        }
        out.push(format!("(clear {})", block(*t.last().unwrap())));
    }
    out.join(" ")
}

/// Blocks with a hidden initial arrangement drawn uniformly from `configs`
/// seeded alternatives. Block-to-block moves succeed with probability
/// `success` and otherwise drop the block on the table; moves from and to
/// the table are deterministic. Goal: the single tower b1 on b2 ... on bk.
pub(super) fn blocks(name: &str, k: u32, success: f64, configs: usize, seed: u64) -> (String, String) {
    let domain = format!(
        "(define (domain blocks)
  (:types block)
  (:predicates (on ?x ?y - block) (ontable ?x - block) (clear ?x - block))
  (:action move
    :parameters (?x ?y ?z - block)
    :precondition (and (on ?x ?y) (clear ?x) (clear ?z))
    :effect (probabilistic
              {success} (and (not (on ?x ?y)) (clear ?y) (on ?x ?z) (not (clear ?z)))
              {fail} (and (not (on ?x ?y)) (clear ?y) (ontable ?x))))
  (:action unstack
    :parameters (?x ?y - block)
    :precondition (and (on ?x ?y) (clear ?x))
    :effect (and (not (on ?x ?y)) (clear ?y) (ontable ?x)))
  (:action stack
    :parameters (?x ?z - block)
    :precondition (and (ontable ?x) (clear ?x) (clear ?z))
    :effect (and (not (ontable ?x)) (not (clear ?z)) (on ?x ?z)))
  (:action sense-on
    :parameters (?x ?y - block)
    :observe (on ?x ?y))
  (:action sense-clear
    :parameters (?x - block)
    :observe (clear ?x)))
",
        fail = 1.0 - success
    );
    let goal_tower: Vec<u32> = (1..=k).rev().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<Config> = Vec::new();
    let mut tries = 0;
    while found.len() < configs.max(1) && tries < 10_000 {
        tries += 1;
        let c = random_config(k, &mut rng);
        if c != vec![goal_tower.clone()] && !found.contains(&c) {
            found.push(c);
        }
    }
    let m = found.len();
    let mut init = String::from("    (probabilistic");
    for c in &found {
        let _ = write!(init, "\n      1/{m} (and {})", config_literals(c));
    }
    init.push_str(")\n");
    let mut goal: Vec<String> = goal_tower
        .windows(2)
        .map(|w| format!("(on {} {})", block(w[1]), block(w[0])))
        .collect();
    goal.push(format!("(ontable {})", block(k)));
    let names: Vec<String> = (1..=k).map(block).collect();
    let problem = format!(
        "(define (problem {name}) (domain blocks)
  (:constants {} - block)
  (:init
{init}  )
  (:goal (and {})))
",
        names.join(" "),
        goal.join(" ")
    );
    (domain, problem)
}

/// Binary directory tree of the given depth; the file sits in a non-root
/// directory with a geometric prior in breadth-first order and must be
/// brought to the root.
pub(super) fn unix(name: &str, depth: u32, ratio: f64) -> (String, String) {
    let domain = "(define (domain unix)
  (:types dir)
  (:predicates (at ?d - dir) (child ?p ?c - dir) (root ?d - dir) (file-in ?d - dir) (holding))
  (:action cd-down
    :parameters (?p ?c - dir)
    :precondition (and (at ?p) (child ?p ?c))
    :effect (and (not (at ?p)) (at ?c)))
  (:action cd-up
    :parameters (?c ?p - dir)
    :precondition (and (at ?c) (child ?p ?c))
    :effect (and (not (at ?c)) (at ?p)))
  (:action ls
    :parameters (?d - dir)
    :precondition (at ?d)
    :observe (file-in ?d))
  (:action take
    :parameters (?d - dir)
    :precondition (and (at ?d) (file-in ?d))
    :effect (and (not (file-in ?d)) (holding)))
  (:action put
    :parameters (?d - dir)
    :precondition (and (at ?d) (root ?d) (holding))
    :effect (and (not (holding)) (file-in ?d))))
"
    .to_string();
    let count = (1u32 << (depth + 1)) - 1;
    let dir = |i: u32| format!("d{i}");
    let mut init = String::new();
    let _ = writeln!(init, "    (at d0)\n    (root d0)");
    for c in 1..count {
        let _ = writeln!(init, "    (child {} {})", dir((c - 1) / 2), dir(c));
    }
    let prior = geometric_prior((count - 1) as usize, ratio);
    init.push_str("    (probabilistic");
    for (i, p) in prior.iter().enumerate() {
        let _ = write!(init, " {p} (and (file-in {}))", dir(i as u32 + 1));
    }
    init.push_str(")\n");
    let names: Vec<String> = (0..count).map(dir).collect();
    let problem = format!(
        "(define (problem {name}) (domain unix)
  (:constants {} - dir)
  (:init
{init}  )
  (:goal (file-in d0)))
",
        names.join(" ")
    );
    (domain, problem)
}

/// One hidden illness out of `n` with a geometric prior; each illness can be
/// tested for independently, and treating the right one cures.
pub(super) fn medpks(name: &str, n: u32, ratio: f64) -> (String, String) {
    let domain = "(define (domain medpks)
  (:types illness)
  (:predicates (ill ?i - illness) (cured))
  (:action test
    :parameters (?i - illness)
    :observe (ill ?i))
  (:action treat
    :parameters (?i - illness)
    :effect (when (ill ?i) (cured))))
"
    .to_string();
    let prior = geometric_prior(n as usize, ratio);
    let mut init = String::from("    (probabilistic");
    for (i, p) in prior.iter().enumerate() {
        let _ = write!(init, " {p} (and (ill i{}))", i + 1);
    }
    init.push_str(")\n");
    let names: Vec<String> = (1..=n).map(|i| format!("i{i}")).collect();
    let problem = format!(
        "(define (problem {name}) (domain medpks)
  (:constants {} - illness)
  (:init
{init}  )
  (:goal (cured)))
",
        names.join(" ")
    );
    (domain, problem)
}

//! Print a grounded problem back in the input grammar, as a domain with
//! 0-ary predicates and parameterless actions.

use std::fmt::Write;

use crate::model::{FactId, Formula, Literal, Problem, StochasticFormula};

fn lit(p: &Problem, l: Literal) -> String {
    if l.positive {
        format!("({})", p.fact_name(l.fact))
    } else {
        format!("(not ({}))", p.fact_name(l.fact))
    }
}

fn conj(p: &Problem, ls: &[Literal]) -> String {
    let mut s = String::from("(and");
    for &l in ls {
        s.push(' ');
        s.push_str(&lit(p, l));
    }
    s.push(')');
    s
}

fn formula(p: &Problem, f: &Formula) -> String {
    let names = |id: FactId| p.fact_name(id).to_string();
    f.display(&names).to_string()
}

fn outcome(p: &Problem, sf: &StochasticFormula) -> String {
    if sf.is_deterministic() {
        conj(p, &sf.options[0].literals)
    } else {
        let mut s = String::from("(probabilistic");
        for o in &sf.options {
            let _ = write!(s, " {} {}", o.probability, conj(p, &o.literals));
        }
        s.push(')');
        s
    }
}

pub fn print_domain(p: &Problem) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "(define (domain {})", p.domain);
    s.push_str("  (:predicates");
    for n in p.fact_names() {
        let _ = write!(s, "\n    ({n})");
    }
    s.push_str(")\n");
    for a in p.actions() {
        let _ = writeln!(s, "  (:action {}", a.name);
        s.push_str("    :parameters ()\n");
        let _ = writeln!(s, "    :precondition {}", formula(p, a.pre.formula()));
        if a.actuates() {
            s.push_str("    :effect (and");
            for e in &a.effects {
                if e.condition.is_trivial() {
                    let _ = write!(s, " {}", outcome(p, &e.outcome));
                } else {
                    let _ = write!(
                        s,
                        " (when {} {})",
                        formula(p, e.condition.formula()),
                        outcome(p, &e.outcome)
                    );
                }
            }
            s.push_str(")\n");
        }
        if a.senses() {
            s.push_str("    :observe (and");
            for &f in &a.observes {
                let _ = write!(s, " ({})", p.fact_name(f));
            }
            s.push_str(")\n");
        }
        s.push_str("  )\n");
    }
    s.push_str(")\n");
    s
}

pub fn print_problem(p: &Problem) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "(define (problem {})", p.name);
    let _ = writeln!(s, "  (domain {})", p.domain);
    s.push_str("  (:init");
    for &l in &p.initial.known {
        if l.positive {
            let _ = write!(s, "\n    {}", lit(p, l));
        }
    }
    for c in &p.initial.constraints {
        let _ = write!(s, "\n    {}", formula(p, c));
    }
    for sf in &p.initial.stochastic {
        s.push_str("\n    (probabilistic");
        for o in &sf.options {
            let _ = write!(s, " {} {}", o.probability, conj(p, &o.literals));
        }
        s.push(')');
    }
    s.push_str(")\n");
    let _ = writeln!(s, "  (:goal {}))", formula(p, p.goal.formula()));
    s
}

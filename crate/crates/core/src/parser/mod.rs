//! Reading problems from the s-expression contingent planning format.
//!
//! The grammar extends contingent PDDL:
//!
//! ```text
//! (define (domain D)
//!   (:types cell)
//!   (:predicates (at ?c - cell) (open ?c - cell) (adj ?a ?b - cell))
//!   (:action move
//!     :parameters (?from ?to - cell)
//!     :precondition (and (at ?from) (adj ?from ?to) (open ?to))
//!     :effect (and (not (at ?from)) (at ?to)))
//!   (:action sense
//!     :parameters (?c - cell)
//!     :precondition (at ?c)
//!     :observe (open ?c)))
//!
//! (define (problem P) (domain D)
//!   (:constants c1 c2 - cell)
//!   (:init (at c1) (adj c1 c2) (oneof (open c1) (open c2))
//!          (probabilistic 0.3 (and (x)) 0.7 (and (y))))
//!   (:goal (at c2)))
//! ```
//!
//! Effects admit `(when cond eff)` and `(probabilistic p1 e1 p2 e2 ...)`
//! where the options are conjunctions of literals. Probabilities are decimals
//! or fractions `a/b`. An action with both `:effect` and `:observe` acts first
//! and then observes the resulting state.

mod ast;
mod ground;
mod printer;
mod sexpr;
mod validate;

use thiserror::Error;

use crate::model::{ModelError, Problem, Span};

pub use printer::{print_domain, print_problem};
pub use validate::{validate, Diagnostic, DiagnosticKind, Severity};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{span}: syntax error: {msg}")]
    Syntax { span: Span, msg: String },
    #[error("{span}: {msg}")]
    Semantic { span: Span, msg: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl ParseError {
    pub(crate) fn syntax(span: Span, msg: impl Into<String>) -> Self {
        ParseError::Syntax { span, msg: msg.into() }
    }
}

fn single_define(text: &str, what: &str) -> Result<sexpr::SExpr, ParseError> {
    let mut es = sexpr::read_all(text)?;
    match es.len() {
        1 => Ok(es.pop().unwrap()),
        0 => Err(ParseError::syntax(Span { line: 1, col: 1 }, format!("empty {what} text"))),
        _ => Err(ParseError::syntax(es[1].span(), format!("trailing input after the {what}"))),
    }
}

/// Parse and ground a domain/problem pair.
pub fn parse(domain_text: &str, problem_text: &str) -> Result<Problem, ParseError> {
    let d = ast::read_domain(&single_define(domain_text, "domain")?)?;
    let p = ast::read_problem(&d, &single_define(problem_text, "problem")?)?;
    ground::ground(&d, &p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FactId, Formula, Literal};

    const DOMAIN: &str = "
        (define (domain toy)
          (:types cell)
          (:predicates (at ?c - cell) (open ?c - cell) (adj ?a ?b - cell) (done))
          (:action move
            :parameters (?from ?to - cell)
            :precondition (and (at ?from) (adj ?from ?to) (open ?to))
            :effect (and (not (at ?from)) (at ?to)))
          (:action sense
            :parameters (?c - cell)
            :precondition (and)
            :observe (open ?c))
          (:action finish
            :parameters ()
            :precondition (at c2)
            :effect (probabilistic 1/4 (done) 3/4 (and (done) (open c1)))))";

    const PROBLEM: &str = "
        (define (problem p1) (domain toy)
          (:constants c1 c2 - cell)
          (:init (at c1) (adj c1 c2) (adj c2 c1) (oneof (open c1) (open c2)))
          (:goal (done)))";

    #[test]
    fn grounds_static_adjacency_away() {
        let p = parse(DOMAIN, PROBLEM).unwrap();
        assert!(p.fact("adj.c1.c2").is_none());
        assert_eq!(p.fact_names(), &["at.c1", "at.c2", "open.c1", "open.c2", "done"]);
        let names: Vec<&str> = p.actions().iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, vec!["move.c1.c2", "move.c2.c1", "sense.c1", "sense.c2", "finish"]);
        let fin = &p.actions()[4];
        assert_eq!(fin.effects[0].outcome.options[0].probability, 0.25);
        assert!(p.is_hidden_initially(p.fact("open.c1").unwrap()));
        assert_eq!(p.initial.known, vec![Literal::pos(FactId(0))]);
        assert_eq!(
            p.initial.constraints,
            vec![Formula::OneOf(vec![Literal::pos(FactId(2)), Literal::pos(FactId(3))])]
        );
    }

    #[test]
    fn empty_init_is_rejected() {
        let prob = "(define (problem p1) (domain toy) (:constants c1 c2 - cell) (:init) (:goal (done)))";
        let err = parse(DOMAIN, prob).unwrap_err();
        assert!(err.to_string().contains(":init"), "{err}");
    }

    #[test]
    fn semantic_errors() {
        let undeclared = PROBLEM.replace("(:goal (done))", "(:goal (gone))");
        assert!(parse(DOMAIN, &undeclared).unwrap_err().to_string().contains("undeclared predicate"));
        let arity = PROBLEM.replace("(:goal (done))", "(:goal (done c1))");
        assert!(parse(DOMAIN, &arity).unwrap_err().to_string().contains("arity"));
        let bad_sum = DOMAIN.replace("3/4", "1/2");
        assert!(parse(&bad_sum, PROBLEM).is_err());
        let oneof_nonlit = PROBLEM.replace("(oneof (open c1) (open c2))", "(oneof (and (open c1)) (open c2))");
        assert!(parse(DOMAIN, &oneof_nonlit).unwrap_err().to_string().contains("non-literals"));
        let zero = DOMAIN.replace("1/4 (done) 3/4", "0 (done) 1");
        assert!(parse(&zero, PROBLEM).is_err());
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse("(define (domain x)\n  (:predicates (p)", PROBLEM).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn round_trip() {
        let p = parse(DOMAIN, PROBLEM).unwrap();
        let q = parse(&print_domain(&p), &print_problem(&p)).unwrap();
        assert_eq!(p.fact_names(), q.fact_names());
        assert_eq!(p.actions(), q.actions());
        assert_eq!(p.initial, q.initial);
        assert_eq!(p.goal, q.goal);
    }
}

//! Propositional formulas over grounded facts.

use std::fmt;

use super::State;

/// Dense index of a grounded fact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct FactId(pub u32);

impl FactId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub fact: FactId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(fact: FactId) -> Self {
        Literal { fact, positive: true }
    }

    pub fn neg(fact: FactId) -> Self {
        Literal { fact, positive: false }
    }

    #[inline]
    pub fn negate(self) -> Self {
        Literal {
            fact: self.fact,
            positive: !self.positive,
        }
    }

    #[inline]
    pub fn holds_in(self, s: &State) -> bool {
        s.get(self.fact) == self.positive
    }

    /// Value of the literal under a (possibly partial) fact assignment.
    #[inline]
    pub fn value_under(self, fact_value: Option<bool>) -> Option<bool> {
        fact_value.map(|v| v == self.positive)
    }
}

/// Propositional formula. `OneOf` holds iff exactly one of its literals holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Lit(Literal),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    OneOf(Vec<Literal>),
}

impl Formula {
    pub fn lit(l: Literal) -> Self {
        Formula::Lit(l)
    }

    pub fn atom(f: FactId) -> Self {
        Formula::Lit(Literal::pos(f))
    }

    /// Conjunction with constant folding and flattening.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut out: Vec<Formula> = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => {
                    for q in inner {
                        if push_conjunct(&mut out, q) {
                            return Formula::False;
                        }
                    }
                }
                other => {
                    if push_conjunct(&mut out, other) {
                        return Formula::False;
                    }
                }
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Disjunction with constant folding and flattening.
    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut out: Vec<Formula> = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => {
                    for q in inner {
                        if push_disjunct(&mut out, q) {
                            return Formula::True;
                        }
                    }
                }
                other => {
                    if push_disjunct(&mut out, other) {
                        return Formula::True;
                    }
                }
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Lit(l) => Formula::Lit(l.negate()),
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or([Formula::not(a), b])
    }

    pub fn conjunction_of(lits: &[Literal]) -> Self {
        Formula::and(lits.iter().map(|&l| Formula::Lit(l)))
    }

    pub fn eval(&self, s: &State) -> bool {
        self.eval_with(&|l: Literal| l.holds_in(s))
    }

    pub fn eval_with<F: Fn(Literal) -> bool>(&self, value: &F) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Lit(l) => value(*l),
            Formula::Not(f) => !f.eval_with(value),
            Formula::And(fs) => fs.iter().all(|f| f.eval_with(value)),
            Formula::Or(fs) => fs.iter().any(|f| f.eval_with(value)),
            Formula::OneOf(ls) => ls.iter().filter(|l| value(**l)).count() == 1,
        }
    }

    /// Kleene three-valued evaluation under a partial assignment.
    pub fn partial_eval<F: Fn(FactId) -> Option<bool>>(&self, value: &F) -> Option<bool> {
        match self {
            Formula::True => Some(true),
            Formula::False => Some(false),
            Formula::Lit(l) => l.value_under(value(l.fact)),
            Formula::Not(f) => f.partial_eval(value).map(|v| !v),
            Formula::And(fs) => {
                let mut unknown = false;
                for f in fs {
                    match f.partial_eval(value) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            Formula::Or(fs) => {
                let mut unknown = false;
                for f in fs {
                    match f.partial_eval(value) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
            Formula::OneOf(ls) => {
                let mut trues = 0;
                let mut unknown = 0;
                for l in ls {
                    match l.value_under(value(l.fact)) {
                        Some(true) => trues += 1,
                        None => unknown += 1,
                        Some(false) => {}
                    }
                }
                if trues > 1 {
                    Some(false)
                } else if unknown == 0 {
                    Some(trues == 1)
                } else {
                    None
                }
            }
        }
    }

    /// Substitute known fact values and simplify.
    pub fn assign<F: Fn(FactId) -> Option<bool>>(&self, value: &F) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Lit(l) => match l.value_under(value(l.fact)) {
                Some(true) => Formula::True,
                Some(false) => Formula::False,
                None => self.clone(),
            },
            Formula::Not(f) => Formula::not(f.assign(value)),
            Formula::And(fs) => Formula::and(fs.iter().map(|f| f.assign(value))),
            Formula::Or(fs) => Formula::or(fs.iter().map(|f| f.assign(value))),
            Formula::OneOf(ls) => {
                let mut rest = Vec::new();
                let mut trues = 0;
                for l in ls {
                    match l.value_under(value(l.fact)) {
                        Some(true) => trues += 1,
                        Some(false) => {}
                        None => rest.push(*l),
                    }
                }
                match trues {
                    0 => Formula::one_of_formula(rest.into_iter().map(Formula::Lit).collect()),
                    1 => Formula::and(rest.into_iter().map(|l| Formula::Lit(l.negate()))),
                    _ => Formula::False,
                }
            }
        }
    }

    /// Replace every literal by an arbitrary formula. `OneOf` nodes are expanded
    /// into their exactly-one encoding over the replacements.
    pub fn map_literals<F: FnMut(Literal) -> Formula>(&self, f: &mut F) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Lit(l) => f(*l),
            Formula::Not(g) => Formula::not(g.map_literals(f)),
            Formula::And(gs) => Formula::and(gs.iter().map(|g| g.map_literals(f)).collect::<Vec<_>>()),
            Formula::Or(gs) => Formula::or(gs.iter().map(|g| g.map_literals(f)).collect::<Vec<_>>()),
            Formula::OneOf(ls) => {
                let items: Vec<Formula> = ls.iter().map(|l| f(*l)).collect();
                if items.iter().all(|x| matches!(x, Formula::Lit(_))) {
                    let lits: Vec<Literal> = items
                        .iter()
                        .map(|x| match x {
                            Formula::Lit(l) => *l,
                            _ => unreachable!(),
                        })
                        .collect();
                    Formula::OneOf(lits)
                } else {
                    Formula::one_of_formula(items)
                }
            }
        }
    }

    /// Exactly-one constraint over arbitrary formulas.
    pub fn one_of_formula(items: Vec<Formula>) -> Formula {
        match items.len() {
            0 => Formula::False,
            1 => items.into_iter().next().unwrap(),
            _ => {
                if items.iter().all(|x| matches!(x, Formula::Lit(_))) {
                    return Formula::OneOf(
                        items
                            .into_iter()
                            .map(|x| match x {
                                Formula::Lit(l) => l,
                                _ => unreachable!(),
                            })
                            .collect(),
                    );
                }
                let mut parts = vec![Formula::or(items.clone())];
                for i in 0..items.len() {
                    for j in (i + 1)..items.len() {
                        parts.push(Formula::or([
                            Formula::not(items[i].clone()),
                            Formula::not(items[j].clone()),
                        ]));
                    }
                }
                Formula::and(parts)
            }
        }
    }

    pub fn for_each_literal<F: FnMut(Literal)>(&self, f: &mut F) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Lit(l) => f(*l),
            Formula::Not(g) => g.for_each_literal(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.for_each_literal(f)),
            Formula::OneOf(ls) => ls.iter().for_each(|l| f(*l)),
        }
    }

    /// Facts mentioned by the formula, sorted and deduplicated.
    pub fn facts(&self) -> Vec<FactId> {
        let mut out = Vec::new();
        self.for_each_literal(&mut |l| out.push(l.fact));
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `Some(lits)` when the formula is a conjunction of literals (or `True`).
    pub fn conjunctive_literals(&self) -> Option<Vec<Literal>> {
        match self {
            Formula::True => Some(Vec::new()),
            Formula::Lit(l) => Some(vec![*l]),
            Formula::And(fs) => {
                let mut out = Vec::with_capacity(fs.len());
                for f in fs {
                    match f {
                        Formula::Lit(l) => out.push(*l),
                        Formula::True => {}
                        _ => return None,
                    }
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Negation normal form; `OneOf` and its negation are expanded.
    pub fn nnf(&self) -> Formula {
        self.nnf_signed(true)
    }

    fn nnf_signed(&self, positive: bool) -> Formula {
        match (self, positive) {
            (Formula::True, true) | (Formula::False, false) => Formula::True,
            (Formula::True, false) | (Formula::False, true) => Formula::False,
            (Formula::Lit(l), true) => Formula::Lit(*l),
            (Formula::Lit(l), false) => Formula::Lit(l.negate()),
            (Formula::Not(g), p) => g.nnf_signed(!p),
            (Formula::And(gs), true) | (Formula::Or(gs), false) => {
                Formula::and(gs.iter().map(|g| g.nnf_signed(positive)).collect::<Vec<_>>())
            }
            (Formula::Or(gs), true) | (Formula::And(gs), false) => {
                Formula::or(gs.iter().map(|g| g.nnf_signed(positive)).collect::<Vec<_>>())
            }
            (Formula::OneOf(ls), true) => {
                let mut disjuncts = Vec::with_capacity(ls.len());
                for (i, li) in ls.iter().enumerate() {
                    let mut conj = vec![Formula::Lit(*li)];
                    for (j, lj) in ls.iter().enumerate() {
                        if i != j {
                            conj.push(Formula::Lit(lj.negate()));
                        }
                    }
                    disjuncts.push(Formula::and(conj));
                }
                Formula::or(disjuncts)
            }
            (Formula::OneOf(ls), false) => {
                let mut disjuncts = vec![Formula::and(ls.iter().map(|l| Formula::Lit(l.negate())))];
                for i in 0..ls.len() {
                    for j in (i + 1)..ls.len() {
                        disjuncts.push(Formula::and([Formula::Lit(ls[i]), Formula::Lit(ls[j])]));
                    }
                }
                Formula::or(disjuncts)
            }
        }
    }

    /// Disjunctive normal form as a list of consistent literal conjunctions.
    /// Returns `None` when the expansion would exceed `limit` terms.
    pub fn dnf(&self, limit: usize) -> Option<Vec<Vec<Literal>>> {
        fn go(f: &Formula, limit: usize) -> Option<Vec<Vec<Literal>>> {
            match f {
                Formula::True => Some(vec![Vec::new()]),
                Formula::False => Some(Vec::new()),
                Formula::Lit(l) => Some(vec![vec![*l]]),
                Formula::Or(gs) => {
                    let mut out = Vec::new();
                    for g in gs {
                        out.extend(go(g, limit)?);
                        if out.len() > limit {
                            return None;
                        }
                    }
                    Some(out)
                }
                Formula::And(gs) => {
                    let mut acc: Vec<Vec<Literal>> = vec![Vec::new()];
                    for g in gs {
                        let part = go(g, limit)?;
                        let mut next = Vec::new();
                        for a in &acc {
                            for b in &part {
                                if let Some(m) = merge_terms(a, b) {
                                    next.push(m);
                                }
                            }
                            if next.len() > limit {
                                return None;
                            }
                        }
                        acc = next;
                    }
                    Some(acc)
                }
                Formula::Not(_) | Formula::OneOf(_) => unreachable!("input is in nnf"),
            }
        }
        let mut terms = go(&self.nnf(), limit)?;
        for t in terms.iter_mut() {
            t.sort_unstable();
            t.dedup();
        }
        terms.sort();
        terms.dedup();
        Some(terms)
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Lit(_) => 1,
            Formula::Not(g) => 1 + g.size(),
            Formula::And(gs) | Formula::Or(gs) => 1 + gs.iter().map(|g| g.size()).sum::<usize>(),
            Formula::OneOf(ls) => 1 + ls.len(),
        }
    }

    /// Render with a fact-name lookup, in the s-expression syntax.
    pub fn display<'a>(&'a self, names: &'a dyn Fn(FactId) -> String) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, names }
    }
}

fn merge_terms(a: &[Literal], b: &[Literal]) -> Option<Vec<Literal>> {
    let mut out = a.to_vec();
    for l in b {
        if out.contains(&l.negate()) {
            return None;
        }
        if !out.contains(l) {
            out.push(*l);
        }
    }
    Some(out)
}

/// Returns true when adding `f` makes the conjunction contradictory.
fn push_conjunct(out: &mut Vec<Formula>, f: Formula) -> bool {
    if let Formula::Lit(l) = &f {
        if out.iter().any(|g| matches!(g, Formula::Lit(m) if *m == l.negate())) {
            return true;
        }
        if out.iter().any(|g| matches!(g, Formula::Lit(m) if m == l)) {
            return false;
        }
    }
    out.push(f);
    false
}

/// Returns true when adding `f` makes the disjunction valid.
fn push_disjunct(out: &mut Vec<Formula>, f: Formula) -> bool {
    if let Formula::Lit(l) = &f {
        if out.iter().any(|g| matches!(g, Formula::Lit(m) if *m == l.negate())) {
            return true;
        }
        if out.iter().any(|g| matches!(g, Formula::Lit(m) if m == l)) {
            return false;
        }
    }
    out.push(f);
    false
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    names: &'a dyn Fn(FactId) -> String,
}

impl FormulaDisplay<'_> {
    fn write_lit(&self, f: &mut fmt::Formatter<'_>, l: Literal) -> fmt::Result {
        if l.positive {
            write!(f, "({})", (self.names)(l.fact))
        } else {
            write!(f, "(not ({}))", (self.names)(l.fact))
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, g: &Formula) -> fmt::Result {
        match g {
            Formula::True => write!(f, "(and)"),
            Formula::False => write!(f, "(or)"),
            Formula::Lit(l) => self.write_lit(f, *l),
            Formula::Not(inner) => {
                write!(f, "(not ")?;
                self.write(f, inner)?;
                write!(f, ")")
            }
            Formula::And(gs) | Formula::Or(gs) => {
                write!(f, "({}", if matches!(g, Formula::And(_)) { "and" } else { "or" })?;
                for h in gs {
                    write!(f, " ")?;
                    self.write(f, h)?;
                }
                write!(f, ")")
            }
            Formula::OneOf(ls) => {
                write!(f, "(oneof")?;
                for l in ls {
                    write!(f, " ")?;
                    self.write_lit(f, *l)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.formula)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(i: u32) -> Literal {
        Literal::pos(FactId(i))
    }

    fn state(n: usize, trues: &[u32]) -> State {
        let mut s = State::new(n);
        for &t in trues {
            s.set(FactId(t), true);
        }
        s
    }

    #[test]
    fn negation_is_an_involution() {
        let l = p(3);
        assert_eq!(l.negate().negate(), l);
    }

    #[test]
    fn oneof_is_exactly_one() {
        let f = Formula::OneOf(vec![p(0), p(1)]);
        assert!(f.eval(&state(2, &[0])));
        assert!(!f.eval(&state(2, &[0, 1])));
        assert!(!f.eval(&state(2, &[])));
    }

    #[test]
    fn contradiction_negated_is_tautology() {
        let f = Formula::Not(Box::new(Formula::And(vec![
            Formula::Lit(p(0)),
            Formula::Lit(p(0).negate()),
        ])));
        for bits in 0..2u32 {
            let s = state(1, if bits == 1 { &[0] } else { &[] });
            assert!(f.eval(&s));
        }
    }

    #[test]
    fn smart_constructors_fold() {
        assert_eq!(Formula::and([Formula::Lit(p(0)), Formula::Lit(p(0).negate())]), Formula::False);
        assert_eq!(Formula::or([Formula::Lit(p(0)), Formula::Lit(p(0).negate())]), Formula::True);
        assert_eq!(Formula::and([Formula::True, Formula::Lit(p(1))]), Formula::Lit(p(1)));
    }

    #[test]
    fn assign_oneof() {
        let f = Formula::OneOf(vec![p(0), p(1), p(2)]);
        let g = f.assign(&|id: FactId| if id.0 == 0 { Some(true) } else { None });
        assert_eq!(g, Formula::and([Formula::Lit(p(1).negate()), Formula::Lit(p(2).negate())]));
    }

    #[test]
    fn dnf_of_oneof_pre() {
        let f = Formula::OneOf(vec![p(0), p(1)]);
        let d = f.dnf(16).unwrap();
        assert_eq!(d.len(), 2);
    }
}

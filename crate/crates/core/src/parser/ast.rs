//! Lifted (ungrounded) domain and problem definitions read from s-expressions.

use std::collections::HashMap;

use crate::model::Span;

use super::sexpr::SExpr;
use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Var(String),
    Const(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LAtom {
    pub pred: usize,
    pub args: Vec<Term>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LFormula {
    Atom(LAtom),
    Not(Box<LFormula>),
    And(Vec<LFormula>),
    Or(Vec<LFormula>),
    /// Elements are literals (atoms or negated atoms).
    OneOf(Vec<LFormula>),
}

impl LFormula {
    pub fn truth() -> Self {
        LFormula::And(Vec::new())
    }

    pub fn visit_atoms<F: FnMut(&LAtom)>(&self, f: &mut F) {
        match self {
            LFormula::Atom(a) => f(a),
            LFormula::Not(g) => g.visit_atoms(f),
            LFormula::And(gs) | LFormula::Or(gs) | LFormula::OneOf(gs) => {
                gs.iter().for_each(|g| g.visit_atoms(f))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LEffect {
    Lit(LAtom, bool),
    And(Vec<LEffect>),
    When(LFormula, Box<LEffect>),
    Probabilistic(Vec<(f64, LEffect)>, Span),
}

impl LEffect {
    pub fn visit_atoms<F: FnMut(&LAtom)>(&self, f: &mut F) {
        match self {
            LEffect::Lit(a, _) => f(a),
            LEffect::And(es) => es.iter().for_each(|e| e.visit_atoms(f)),
            LEffect::When(_, e) => e.visit_atoms(f),
            LEffect::Probabilistic(os, _) => os.iter().for_each(|(_, e)| e.visit_atoms(f)),
        }
    }

    pub fn visit_conditions<F: FnMut(&LFormula)>(&self, f: &mut F) {
        match self {
            LEffect::Lit(..) => {}
            LEffect::And(es) => es.iter().for_each(|e| e.visit_conditions(f)),
            LEffect::When(c, e) => {
                f(c);
                e.visit_conditions(f)
            }
            LEffect::Probabilistic(os, _) => os.iter().for_each(|(_, e)| e.visit_conditions(f)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredicateDecl {
    pub name: String,
    pub param_types: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub pre: LFormula,
    pub effect: Option<LEffect>,
    pub observe: Option<Vec<LAtom>>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DomainDef {
    pub name: String,
    /// Type name to parent type.
    pub types: HashMap<String, String>,
    pub constants: Vec<(String, String)>,
    pub predicates: Vec<PredicateDecl>,
    pub schemas: Vec<Schema>,
}

impl DomainDef {
    pub fn predicate(&self, name: &str) -> Option<usize> {
        self.predicates.iter().position(|p| p.name == name)
    }

    /// Whether `t` equals `ancestor` or descends from it.
    pub fn is_subtype(&self, t: &str, ancestor: &str) -> bool {
        let mut cur = t;
        for _ in 0..=self.types.len() {
            if cur == ancestor {
                return true;
            }
            match self.types.get(cur) {
                Some(p) => cur = p,
                None => return ancestor == "object",
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitItem {
    Known(LAtom, bool),
    Clause(LFormula),
    Probabilistic(Vec<(f64, Vec<(LAtom, bool)>)>, Span),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProblemDef {
    pub name: String,
    pub domain: String,
    pub objects: Vec<(String, String)>,
    pub init: Vec<InitItem>,
    pub init_span: Option<Span>,
    pub goal: Option<LFormula>,
}

fn semantic(span: Span, msg: impl Into<String>) -> ParseError {
    ParseError::Semantic {
        span,
        msg: msg.into(),
    }
}

fn expect_list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], ParseError> {
    e.as_list()
        .ok_or_else(|| ParseError::syntax(e.span(), format!("expected a list for {what}")))
}

fn expect_atom<'a>(e: &'a SExpr, what: &str) -> Result<&'a str, ParseError> {
    e.as_atom()
        .ok_or_else(|| ParseError::syntax(e.span(), format!("expected a symbol for {what}")))
}

/// `(define (KIND NAME) sections...)` returning the name and the sections.
fn unwrap_define<'a>(e: &'a SExpr, kind: &str) -> Result<(String, &'a [SExpr]), ParseError> {
    let items = expect_list(e, "define")?;
    if items.first().and_then(|h| h.as_atom()) != Some("define") {
        return Err(ParseError::syntax(e.span(), "expected `(define ...)`"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| ParseError::syntax(e.span(), format!("missing `({kind} NAME)`")))?;
    let h = expect_list(header, kind)?;
    if h.len() != 2 || h[0].as_atom() != Some(kind) {
        return Err(ParseError::syntax(header.span(), format!("expected `({kind} NAME)`")));
    }
    Ok((expect_atom(&h[1], "name")?.to_string(), &items[2..]))
}

/// Parse `a b - t c - u d` style typed lists. Untyped entries get `object`.
fn typed_list(items: &[SExpr]) -> Result<Vec<(String, String)>, ParseError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let a = expect_atom(&items[i], "typed list entry")?;
        if a == "-" {
            let t = items
                .get(i + 1)
                .ok_or_else(|| ParseError::syntax(items[i].span(), "missing type after `-`"))?;
            let t = expect_atom(t, "type")?;
            for p in pending.drain(..) {
                out.push((p, t.to_string()));
            }
            i += 2;
        } else {
            pending.push(a.to_string());
            i += 1;
        }
    }
    for p in pending {
        out.push((p, "object".to_string()));
    }
    Ok(out)
}

pub fn read_domain(e: &SExpr) -> Result<DomainDef, ParseError> {
    let (name, sections) = unwrap_define(e, "domain")?;
    let mut d = DomainDef {
        name,
        ..Default::default()
    };
    // Predicates must be known before actions are read.
    for s in sections {
        let items = expect_list(s, "domain section")?;
        match s.head() {
            Some(":requirements") => {}
            Some(":types") => {
                for (t, parent) in typed_list(&items[1..])? {
                    d.types.insert(t, parent);
                }
            }
            Some(":constants") => d.constants.extend(typed_list(&items[1..])?),
            Some(":predicates") => {
                for p in &items[1..] {
                    let pl = expect_list(p, "predicate")?;
                    let pname = pl
                        .first()
                        .ok_or_else(|| ParseError::syntax(p.span(), "empty predicate"))?;
                    let pname = expect_atom(pname, "predicate name")?.to_string();
                    if d.predicate(&pname).is_some() {
                        return Err(semantic(p.span(), format!("predicate `{pname}` declared twice")));
                    }
                    let params = typed_list(&pl[1..])?;
                    d.predicates.push(PredicateDecl {
                        name: pname,
                        param_types: params.into_iter().map(|(_, t)| t).collect(),
                    });
                }
            }
            Some(":action") => {}
            Some(other) => return Err(ParseError::syntax(s.span(), format!("unknown domain section `{other}`"))),
            None => return Err(ParseError::syntax(s.span(), "expected a section keyword")),
        }
    }
    for s in sections {
        if s.head() == Some(":action") {
            let schema = read_schema(&d, s)?;
            if d.schemas.iter().any(|x| x.name == schema.name) {
                return Err(semantic(s.span(), format!("action `{}` declared twice", schema.name)));
            }
            d.schemas.push(schema);
        }
    }
    Ok(d)
}

fn read_schema(d: &DomainDef, e: &SExpr) -> Result<Schema, ParseError> {
    let items = expect_list(e, "action")?;
    let name = items
        .get(1)
        .ok_or_else(|| ParseError::syntax(e.span(), "action without a name"))?;
    let name = expect_atom(name, "action name")?.to_string();
    let mut schema = Schema {
        name,
        params: Vec::new(),
        pre: LFormula::truth(),
        effect: None,
        observe: None,
        span: e.span(),
    };
    let mut i = 2;
    while i < items.len() {
        let key = expect_atom(&items[i], "action keyword")?;
        let val = items
            .get(i + 1)
            .ok_or_else(|| ParseError::syntax(items[i].span(), format!("missing value for `{key}`")))?;
        match key {
            ":parameters" => {
                schema.params = typed_list(expect_list(val, "parameters")?)?;
                for (p, _) in &schema.params {
                    if !p.starts_with('?') {
                        return Err(semantic(val.span(), format!("parameter `{p}` must start with `?`")));
                    }
                }
            }
            ":precondition" => schema.pre = read_formula(d, val, &schema.params)?,
            ":effect" => schema.effect = Some(read_effect(d, val, &schema.params)?),
            ":observe" => {
                let mut atoms = Vec::new();
                if val.head() == Some("and") {
                    for x in &val.as_list().unwrap()[1..] {
                        atoms.push(read_atom(d, x, &schema.params)?);
                    }
                } else {
                    atoms.push(read_atom(d, val, &schema.params)?);
                }
                if atoms.is_empty() {
                    return Err(semantic(val.span(), "`:observe` lists no facts"));
                }
                schema.observe = Some(atoms);
            }
            other => return Err(ParseError::syntax(items[i].span(), format!("unknown action keyword `{other}`"))),
        }
        i += 2;
    }
    Ok(schema)
}

fn read_term(e: &SExpr, params: &[(String, String)]) -> Result<Term, ParseError> {
    let a = expect_atom(e, "term")?;
    if a.starts_with('?') {
        if !params.iter().any(|(p, _)| p == a) {
            return Err(semantic(e.span(), format!("unbound variable `{a}`")));
        }
        Ok(Term::Var(a.to_string()))
    } else {
        Ok(Term::Const(a.to_string()))
    }
}

pub fn read_atom(d: &DomainDef, e: &SExpr, params: &[(String, String)]) -> Result<LAtom, ParseError> {
    let items = expect_list(e, "atom")?;
    let name = items
        .first()
        .ok_or_else(|| ParseError::syntax(e.span(), "empty atom"))?;
    let name = expect_atom(name, "predicate")?;
    let pred = d
        .predicate(name)
        .ok_or_else(|| semantic(e.span(), format!("undeclared predicate `{name}`")))?;
    let args = items[1..]
        .iter()
        .map(|x| read_term(x, params))
        .collect::<Result<Vec<_>, _>>()?;
    let arity = d.predicates[pred].param_types.len();
    if args.len() != arity {
        return Err(semantic(
            e.span(),
            format!("arity mismatch for `{name}`: expected {arity}, got {}", args.len()),
        ));
    }
    Ok(LAtom {
        pred,
        args,
        span: e.span(),
    })
}

fn read_literal(d: &DomainDef, e: &SExpr, params: &[(String, String)]) -> Result<(LAtom, bool), ParseError> {
    if e.head() == Some("not") {
        let items = e.as_list().unwrap();
        if items.len() != 2 {
            return Err(ParseError::syntax(e.span(), "`not` takes one argument"));
        }
        Ok((read_atom(d, &items[1], params)?, false))
    } else {
        Ok((read_atom(d, e, params)?, true))
    }
}

pub fn read_formula(d: &DomainDef, e: &SExpr, params: &[(String, String)]) -> Result<LFormula, ParseError> {
    let items = expect_list(e, "formula")?;
    match e.head() {
        Some("and") => Ok(LFormula::And(
            items[1..]
                .iter()
                .map(|x| read_formula(d, x, params))
                .collect::<Result<_, _>>()?,
        )),
        Some("or") => Ok(LFormula::Or(
            items[1..]
                .iter()
                .map(|x| read_formula(d, x, params))
                .collect::<Result<_, _>>()?,
        )),
        Some("not") => {
            if items.len() != 2 {
                return Err(ParseError::syntax(e.span(), "`not` takes one argument"));
            }
            Ok(LFormula::Not(Box::new(read_formula(d, &items[1], params)?)))
        }
        Some("oneof") => {
            let mut lits = Vec::new();
            for x in &items[1..] {
                let is_lit = match x.head() {
                    Some("not") => x.as_list().unwrap().get(1).and_then(|y| y.head()).is_some_and(|h| {
                        !matches!(h, "and" | "or" | "not" | "oneof")
                    }),
                    Some("and" | "or" | "oneof" | "when" | "probabilistic") => false,
                    Some(_) => true,
                    None => false,
                };
                if !is_lit {
                    return Err(semantic(x.span(), "oneof over non-literals"));
                }
                let (a, pos) = read_literal(d, x, params)?;
                let l = LFormula::Atom(a);
                lits.push(if pos { l } else { LFormula::Not(Box::new(l)) });
            }
            Ok(LFormula::OneOf(lits))
        }
        Some("when" | "probabilistic") => Err(semantic(e.span(), "effect construct in a formula")),
        _ => Ok(LFormula::Atom(read_atom(d, e, params)?)),
    }
}

pub fn parse_probability(e: &SExpr) -> Result<f64, ParseError> {
    let a = expect_atom(e, "probability")?;
    let v = if let Some((n, m)) = a.split_once('/') {
        match (n.parse::<f64>(), m.parse::<f64>()) {
            (Ok(n), Ok(m)) if m != 0.0 => Some(n / m),
            _ => None,
        }
    } else {
        a.parse::<f64>().ok()
    };
    match v {
        Some(p) if p.is_finite() => {
            if p <= 0.0 || p > 1.0 {
                Err(semantic(e.span(), format!("probability {a} outside (0,1]")))
            } else {
                Ok(p)
            }
        }
        _ => Err(ParseError::syntax(e.span(), format!("`{a}` is not a probability"))),
    }
}

fn read_effect(d: &DomainDef, e: &SExpr, params: &[(String, String)]) -> Result<LEffect, ParseError> {
    let items = expect_list(e, "effect")?;
    match e.head() {
        Some("and") => Ok(LEffect::And(
            items[1..]
                .iter()
                .map(|x| read_effect(d, x, params))
                .collect::<Result<_, _>>()?,
        )),
        Some("when") => {
            if items.len() != 3 {
                return Err(ParseError::syntax(e.span(), "`when` takes a condition and an effect"));
            }
            Ok(LEffect::When(
                read_formula(d, &items[1], params)?,
                Box::new(read_effect(d, &items[2], params)?),
            ))
        }
        Some("probabilistic") => {
            let rest = &items[1..];
            if rest.is_empty() || rest.len() % 2 != 0 {
                return Err(ParseError::syntax(e.span(), "`probabilistic` takes probability/effect pairs"));
            }
            let mut opts = Vec::new();
            for pair in rest.chunks(2) {
                opts.push((parse_probability(&pair[0])?, read_effect(d, &pair[1], params)?));
            }
            Ok(LEffect::Probabilistic(opts, e.span()))
        }
        _ => {
            let (a, pos) = read_literal(d, e, params)?;
            Ok(LEffect::Lit(a, pos))
        }
    }
}

fn read_init_literals(d: &DomainDef, e: &SExpr, out: &mut Vec<(LAtom, bool)>) -> Result<(), ParseError> {
    if e.head() == Some("and") {
        for x in &e.as_list().unwrap()[1..] {
            read_init_literals(d, x, out)?;
        }
        Ok(())
    } else {
        out.push(read_literal(d, e, &[])?);
        Ok(())
    }
}

fn read_init_item(d: &DomainDef, e: &SExpr, out: &mut Vec<InitItem>) -> Result<(), ParseError> {
    match e.head() {
        Some("and") => {
            for x in &e.as_list().unwrap()[1..] {
                read_init_item(d, x, out)?;
            }
        }
        Some("oneof" | "or") => out.push(InitItem::Clause(read_formula(d, e, &[])?)),
        Some("probabilistic") => {
            let rest = &e.as_list().unwrap()[1..];
            if rest.is_empty() || rest.len() % 2 != 0 {
                return Err(ParseError::syntax(e.span(), "`probabilistic` takes probability/option pairs"));
            }
            let mut opts = Vec::new();
            for pair in rest.chunks(2) {
                let p = parse_probability(&pair[0])?;
                let mut lits = Vec::new();
                read_init_literals(d, &pair[1], &mut lits)?;
                if lits.is_empty() {
                    return Err(semantic(pair[1].span(), "empty probabilistic option"));
                }
                opts.push((p, lits));
            }
            out.push(InitItem::Probabilistic(opts, e.span()));
        }
        Some("not") => {
            let (a, pos) = read_literal(d, e, &[])?;
            out.push(InitItem::Known(a, pos));
        }
        _ => out.push(InitItem::Known(read_atom(d, e, &[])?, true)),
    }
    Ok(())
}

pub fn read_problem(d: &DomainDef, e: &SExpr) -> Result<ProblemDef, ParseError> {
    let (name, sections) = unwrap_define(e, "problem")?;
    let mut p = ProblemDef {
        name,
        ..Default::default()
    };
    let mut seen_domain = false;
    for s in sections {
        let items = expect_list(s, "problem section")?;
        match s.head() {
            Some("domain" | ":domain") => {
                let dn = items
                    .get(1)
                    .ok_or_else(|| ParseError::syntax(s.span(), "missing domain name"))?;
                p.domain = expect_atom(dn, "domain name")?.to_string();
                if p.domain != d.name {
                    return Err(semantic(
                        s.span(),
                        format!("problem refers to domain `{}` but `{}` was given", p.domain, d.name),
                    ));
                }
                seen_domain = true;
            }
            Some(":constants" | ":objects") => p.objects.extend(typed_list(&items[1..])?),
            Some(":requirements") => {}
            Some(":init") => {
                p.init_span = Some(s.span());
                for x in &items[1..] {
                    read_init_item(d, x, &mut p.init)?;
                }
            }
            Some(":goal") => {
                if items.len() != 2 {
                    return Err(ParseError::syntax(s.span(), "`:goal` takes one formula"));
                }
                p.goal = Some(read_formula(d, &items[1], &[])?);
            }
            Some(other) => return Err(ParseError::syntax(s.span(), format!("unknown problem section `{other}`"))),
            None => return Err(ParseError::syntax(s.span(), "expected a section keyword")),
        }
    }
    if !seen_domain {
        return Err(semantic(e.span(), "problem does not name its domain"));
    }
    if p.init.is_empty() {
        return Err(semantic(
            p.init_span.unwrap_or(e.span()),
            "missing or empty `:init` section; the initial belief is required",
        ));
    }
    if p.goal.is_none() {
        return Err(semantic(e.span(), "missing `:goal` section"));
    }
    Ok(p)
}

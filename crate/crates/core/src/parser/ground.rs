//! Grounding of lifted definitions into a `Problem`.

use std::collections::{HashMap, HashSet};

use smallvec::SmallVec;

use crate::model::{
    Action, ActionKind, ConditionalEffect, FactId, Formula, Guard, InitialBelief, Literal, Problem, Span,
    StochasticFormula, StochasticOption,
};

use super::ast::{DomainDef, InitItem, LAtom, LEffect, LFormula, ProblemDef, Term};
use super::ParseError;

type AtomKey = (usize, SmallVec<[u32; 4]>);

enum Resolved {
    Const(bool),
    Atom(u32),
}

struct Grounder<'a> {
    d: &'a DomainDef,
    objects: Vec<(String, String)>,
    object_index: HashMap<String, u32>,
    /// Provisional atom ids.
    atoms: HashMap<AtomKey, u32>,
    atom_keys: Vec<AtomKey>,
    static_preds: Vec<bool>,
    init_true: HashSet<AtomKey>,
    hidden: HashSet<AtomKey>,
}

fn semantic(span: Span, msg: impl Into<String>) -> ParseError {
    ParseError::Semantic {
        span,
        msg: msg.into(),
    }
}

/// Conditional effect in lifted form: condition plus options of literal lists.
struct FlatEffect {
    condition: LFormula,
    options: Vec<(f64, Vec<(LAtom, bool)>)>,
    span: Span,
}

fn flatten_effect(e: &LEffect, cond: &[LFormula], out: &mut Vec<FlatEffect>) -> Result<(), ParseError> {
    let cond_formula = || LFormula::And(cond.to_vec());
    match e {
        LEffect::Lit(a, pos) => {
            let c = cond_formula();
            if let Some(fe) = out
                .iter_mut()
                .find(|fe| fe.options.len() == 1 && fe.options[0].0 == 1.0 && fe.condition == c)
            {
                fe.options[0].1.push((a.clone(), *pos));
            } else {
                out.push(FlatEffect {
                    condition: c,
                    options: vec![(1.0, vec![(a.clone(), *pos)])],
                    span: a.span,
                });
            }
        }
        LEffect::And(es) => {
            for x in es {
                flatten_effect(x, cond, out)?;
            }
        }
        LEffect::When(c, inner) => {
            let mut cs = cond.to_vec();
            cs.push(c.clone());
            flatten_effect(inner, &cs, out)?;
        }
        LEffect::Probabilistic(opts, span) => {
            let mut options = Vec::new();
            for (p, oe) in opts {
                let mut lits = Vec::new();
                collect_plain_literals(oe, &mut lits).map_err(|_| {
                    semantic(*span, "probabilistic options must be conjunctions of literals")
                })?;
                options.push((*p, lits));
            }
            out.push(FlatEffect {
                condition: cond_formula(),
                options,
                span: *span,
            });
        }
    }
    Ok(())
}

fn collect_plain_literals(e: &LEffect, out: &mut Vec<(LAtom, bool)>) -> Result<(), ()> {
    match e {
        LEffect::Lit(a, p) => {
            out.push((a.clone(), *p));
            Ok(())
        }
        LEffect::And(es) => es.iter().try_for_each(|x| collect_plain_literals(x, out)),
        _ => Err(()),
    }
}

impl<'a> Grounder<'a> {
    fn object(&self, name: &str, span: Span) -> Result<u32, ParseError> {
        self.object_index
            .get(name)
            .copied()
            .ok_or_else(|| semantic(span, format!("undeclared object `{name}`")))
    }

    fn key(&self, a: &LAtom, binding: &HashMap<&str, u32>) -> Result<AtomKey, ParseError> {
        let mut args = SmallVec::new();
        for t in &a.args {
            args.push(match t {
                Term::Var(v) => *binding
                    .get(v.as_str())
                    .ok_or_else(|| semantic(a.span, format!("unbound variable `{v}`")))?,
                Term::Const(c) => self.object(c, a.span)?,
            });
        }
        Ok((a.pred, args))
    }

    fn intern(&mut self, key: AtomKey) -> u32 {
        if let Some(&id) = self.atoms.get(&key) {
            return id;
        }
        let id = self.atom_keys.len() as u32;
        self.atoms.insert(key.clone(), id);
        self.atom_keys.push(key);
        id
    }

    fn resolve(&mut self, a: &LAtom, binding: &HashMap<&str, u32>) -> Result<Resolved, ParseError> {
        let key = self.key(a, binding)?;
        if self.static_preds[a.pred] && !self.hidden.contains(&key) {
            return Ok(Resolved::Const(self.init_true.contains(&key)));
        }
        Ok(Resolved::Atom(self.intern(key)))
    }

    fn atom_formula(&mut self, a: &LAtom, binding: &HashMap<&str, u32>) -> Result<Formula, ParseError> {
        Ok(match self.resolve(a, binding)? {
            Resolved::Const(true) => Formula::True,
            Resolved::Const(false) => Formula::False,
            Resolved::Atom(id) => Formula::atom(FactId(id)),
        })
    }

    fn formula(&mut self, f: &LFormula, binding: &HashMap<&str, u32>) -> Result<Formula, ParseError> {
        Ok(match f {
            LFormula::Atom(a) => self.atom_formula(a, binding)?,
            LFormula::Not(g) => Formula::not(self.formula(g, binding)?),
            LFormula::And(gs) => {
                let mut parts = Vec::with_capacity(gs.len());
                for g in gs {
                    let x = self.formula(g, binding)?;
                    if x == Formula::False {
                        return Ok(Formula::False);
                    }
                    parts.push(x);
                }
                Formula::and(parts)
            }
            LFormula::Or(gs) => {
                let mut parts = Vec::with_capacity(gs.len());
                for g in gs {
                    parts.push(self.formula(g, binding)?);
                }
                Formula::or(parts)
            }
            LFormula::OneOf(gs) => {
                let mut parts = Vec::with_capacity(gs.len());
                for g in gs {
                    parts.push(self.formula(g, binding)?);
                }
                let trues = parts.iter().filter(|x| **x == Formula::True).count();
                let rest: Vec<Formula> = parts
                    .into_iter()
                    .filter(|x| !matches!(x, Formula::True | Formula::False))
                    .collect();
                match trues {
                    0 => Formula::one_of_formula(rest),
                    1 => Formula::and(rest.into_iter().map(Formula::not)),
                    _ => Formula::False,
                }
            }
        })
    }

    fn literal(&mut self, a: &LAtom, pos: bool, binding: &HashMap<&str, u32>) -> Result<Literal, ParseError> {
        match self.resolve(a, binding)? {
            Resolved::Atom(id) => Ok(Literal {
                fact: FactId(id),
                positive: pos,
            }),
            Resolved::Const(_) => Err(semantic(a.span, "literal over a constant atom")),
        }
    }

    fn bindings(&self, params: &[(String, String)]) -> Vec<Vec<u32>> {
        let candidates: Vec<Vec<u32>> = params
            .iter()
            .map(|(_, t)| {
                self.objects
                    .iter()
                    .enumerate()
                    .filter(|(_, (_, ot))| self.d.is_subtype(ot, t))
                    .map(|(i, _)| i as u32)
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(params.len());
        fn rec(c: &[Vec<u32>], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if cur.len() == c.len() {
                out.push(cur.clone());
                return;
            }
            for &o in &c[cur.len()] {
                if cur.contains(&o) {
                    continue;
                }
                cur.push(o);
                rec(c, cur, out);
                cur.pop();
            }
        }
        rec(&candidates, &mut cur, &mut out);
        out
    }
}

fn renumber(f: &Formula, map: &[u32]) -> Formula {
    f.map_literals(&mut |l| {
        Formula::Lit(Literal {
            fact: FactId(map[l.fact.index()]),
            positive: l.positive,
        })
    })
}

fn renumber_lit(l: Literal, map: &[u32]) -> Literal {
    Literal {
        fact: FactId(map[l.fact.index()]),
        positive: l.positive,
    }
}

struct GroundAction {
    name: String,
    kind: ActionKind,
    pre: Formula,
    effects: Vec<(Formula, Vec<(f64, Vec<Literal>)>, Span)>,
    observes: Vec<u32>,
    span: Span,
}

pub fn ground(d: &DomainDef, p: &ProblemDef) -> Result<Problem, ParseError> {
    let mut objects: Vec<(String, String)> = Vec::new();
    let mut object_index = HashMap::new();
    for (o, t) in d.constants.iter().chain(p.objects.iter()) {
        if object_index.insert(o.clone(), objects.len() as u32).is_some() {
            return Err(semantic(Span::default(), format!("object `{o}` declared twice")));
        }
        objects.push((o.clone(), t.clone()));
    }

    // Predicates written by effects or read by sensing can change or be observed.
    let mut dynamic = vec![false; d.predicates.len()];
    let mut referenced = vec![false; d.predicates.len()];
    for s in &d.schemas {
        if let Some(e) = &s.effect {
            e.visit_atoms(&mut |a| dynamic[a.pred] = true);
            e.visit_conditions(&mut |c| c.visit_atoms(&mut |a| referenced[a.pred] = true));
        }
        if let Some(obs) = &s.observe {
            obs.iter().for_each(|a| dynamic[a.pred] = true);
        }
        s.pre.visit_atoms(&mut |a| referenced[a.pred] = true);
    }
    if let Some(g) = &p.goal {
        g.visit_atoms(&mut |a| referenced[a.pred] = true);
    }
    let static_preds: Vec<bool> = (0..d.predicates.len())
        .map(|i| !dynamic[i] && referenced[i])
        .collect();

    let mut g = Grounder {
        d,
        objects,
        object_index,
        atoms: HashMap::new(),
        atom_keys: Vec::new(),
        static_preds,
        init_true: HashSet::new(),
        hidden: HashSet::new(),
    };

    let empty: HashMap<&str, u32> = HashMap::new();
    for item in &p.init {
        match item {
            InitItem::Known(a, true) => {
                let k = g.key(a, &empty)?;
                g.init_true.insert(k);
            }
            InitItem::Known(a, false) => {
                g.key(a, &empty)?;
            }
            InitItem::Clause(f) => {
                let mut res = Ok(());
                f.visit_atoms(&mut |a| match g.key(a, &empty) {
                    Ok(k) => {
                        g.hidden.insert(k);
                    }
                    Err(e) => res = Err(e),
                });
                res?;
            }
            InitItem::Probabilistic(opts, _) => {
                for (_, lits) in opts {
                    for (a, _) in lits {
                        let k = g.key(a, &empty)?;
                        g.hidden.insert(k);
                    }
                }
            }
        }
    }
    for item in &p.init {
        if let InitItem::Known(a, true) = item {
            let k = g.key(a, &empty)?;
            if g.hidden.contains(&k) {
                return Err(semantic(a.span, "atom is both known true and constrained in `:init`"));
            }
        }
    }

    let mut ground_actions: Vec<GroundAction> = Vec::new();
    for s in &d.schemas {
        let mut flat = Vec::new();
        if let Some(e) = &s.effect {
            flatten_effect(e, &[], &mut flat)?;
        }
        let kind = match (&s.effect, &s.observe) {
            (_, None) => ActionKind::Actuation,
            (None, Some(_)) => ActionKind::Sensing,
            (Some(_), Some(_)) => ActionKind::Combined,
        };
        for binding_objs in g.bindings(&s.params) {
            let binding: HashMap<&str, u32> = s
                .params
                .iter()
                .zip(binding_objs.iter())
                .map(|((v, _), &o)| (v.as_str(), o))
                .collect();
            let pre = g.formula(&s.pre, &binding)?;
            if pre == Formula::False {
                continue;
            }
            let mut effects = Vec::new();
            for fe in &flat {
                let cond = g.formula(&fe.condition, &binding)?;
                if cond == Formula::False {
                    continue;
                }
                let mut options = Vec::new();
                for (prob, lits) in &fe.options {
                    let mut ls = Vec::with_capacity(lits.len());
                    for (a, pos) in lits {
                        let l = g.literal(a, *pos, &binding)?;
                        if !ls.contains(&l) {
                            ls.push(l);
                        }
                    }
                    options.push((*prob, ls));
                }
                effects.push((cond, options, fe.span));
            }
            let mut observes = Vec::new();
            if let Some(obs) = &s.observe {
                for a in obs {
                    let k = g.key(a, &binding)?;
                    let id = g.intern(k);
                    if !observes.contains(&id) {
                        observes.push(id);
                    }
                }
            }
            let mut name = s.name.clone();
            for &o in &binding_objs {
                name.push('.');
                name.push_str(&g.objects[o as usize].0);
            }
            ground_actions.push(GroundAction {
                name,
                kind,
                pre,
                effects,
                observes,
                span: s.span,
            });
        }
    }

    let goal = g.formula(p.goal.as_ref().expect("goal checked by reader"), &empty)?;

    // Initial belief in provisional ids.
    let mut known_true = Vec::new();
    let mut constraints = Vec::new();
    let mut stochastic = Vec::new();
    for item in &p.init {
        match item {
            InitItem::Known(a, true) => {
                if let Resolved::Atom(id) = g.resolve(a, &empty)? {
                    known_true.push(id);
                }
            }
            InitItem::Known(_, false) => {}
            InitItem::Clause(f) => {
                let c = g.formula(f, &empty)?;
                if c == Formula::False {
                    return Err(semantic(p.init_span.unwrap_or_default(), "unsatisfiable initial clause"));
                }
                if c != Formula::True {
                    constraints.push(c);
                }
            }
            InitItem::Probabilistic(opts, span) => {
                let mut options = Vec::new();
                for (prob, lits) in opts {
                    let mut ls = Vec::new();
                    for (a, pos) in lits {
                        ls.push(g.literal(a, *pos, &empty)?);
                    }
                    options.push((*prob, ls, *span));
                }
                stochastic.push(options);
            }
        }
    }

    // Atoms that no remaining action writes or observes and that are not hidden
    // keep their initial value forever; substitute them until nothing changes.
    let num_atoms = g.atom_keys.len();
    let hidden_ids: Vec<bool> = g.atom_keys.iter().map(|k| g.hidden.contains(k)).collect();
    let init_value: Vec<bool> = g.atom_keys.iter().map(|k| g.init_true.contains(k)).collect();
    let mut goal = goal;
    let mut removed = vec![false; num_atoms];
    loop {
        let mut written = hidden_ids.clone();
        let mut read = vec![false; num_atoms];
        for ga in &ground_actions {
            for (cond, options, _) in &ga.effects {
                for (_, ls) in options {
                    ls.iter().for_each(|l| written[l.fact.index()] = true);
                }
                cond.for_each_literal(&mut |l| read[l.fact.index()] = true);
            }
            ga.observes.iter().for_each(|&o| written[o as usize] = true);
            ga.pre.for_each_literal(&mut |l| read[l.fact.index()] = true);
        }
        goal.for_each_literal(&mut |l| read[l.fact.index()] = true);
        let constant: Vec<bool> = (0..num_atoms).map(|i| read[i] && !written[i]).collect();
        if !constant.iter().any(|&c| c) {
            break;
        }
        for (r, &c) in removed.iter_mut().zip(&constant) {
            *r |= c;
        }
        let value = |f: FactId| {
            if constant[f.index()] {
                Some(init_value[f.index()])
            } else {
                None
            }
        };
        goal = goal.assign(&value);
        let mut kept = Vec::with_capacity(ground_actions.len());
        for mut ga in ground_actions {
            ga.pre = ga.pre.assign(&value);
            if ga.pre == Formula::False {
                continue;
            }
            ga.effects = ga
                .effects
                .into_iter()
                .map(|(c, o, s)| (c.assign(&value), o, s))
                .filter(|(c, _, _)| *c != Formula::False)
                .collect();
            kept.push(ga);
        }
        ground_actions = kept;
    }

    // Facts: atoms still mentioned by actions, goal or initial belief.
    let mut used = vec![false; num_atoms];
    for ga in &ground_actions {
        ga.pre.for_each_literal(&mut |l| used[l.fact.index()] = true);
        for (cond, options, _) in &ga.effects {
            cond.for_each_literal(&mut |l| used[l.fact.index()] = true);
            for (_, ls) in options {
                ls.iter().for_each(|l| used[l.fact.index()] = true);
            }
        }
        ga.observes.iter().for_each(|&o| used[o as usize] = true);
    }
    goal.for_each_literal(&mut |l| used[l.fact.index()] = true);
    known_true.retain(|&id| !removed[id as usize]);
    known_true.iter().for_each(|&id| used[id as usize] = true);
    constraints
        .iter()
        .for_each(|c| c.for_each_literal(&mut |l| used[l.fact.index()] = true));
    for options in &stochastic {
        for (_, ls, _) in options {
            ls.iter().for_each(|l| used[l.fact.index()] = true);
        }
    }

    // Order facts by predicate declaration, then by argument object order.
    let mut order: Vec<u32> = (0..g.atom_keys.len() as u32).filter(|&i| used[i as usize]).collect();
    order.sort_by(|&a, &b| g.atom_keys[a as usize].cmp(&g.atom_keys[b as usize]));
    let mut map = vec![u32::MAX; num_atoms];
    for (new, &old) in order.iter().enumerate() {
        map[old as usize] = new as u32;
    }
    let fact_names: Vec<String> = order
        .iter()
        .map(|&old| {
            let (pred, args) = &g.atom_keys[old as usize];
            let mut n = d.predicates[*pred].name.clone();
            for &o in args {
                n.push('.');
                n.push_str(&g.objects[o as usize].0);
            }
            n
        })
        .collect();

    let mut actions = Vec::with_capacity(ground_actions.len());
    let mut spans = Vec::with_capacity(ground_actions.len());
    for ga in ground_actions {
        let pre = renumber(&ga.pre, &map);
        let mut effects = Vec::new();
        for (cond, options, span) in ga.effects {
            let opts: Vec<StochasticOption> = options
                .into_iter()
                .map(|(probability, ls)| StochasticOption {
                    literals: ls.into_iter().map(|l| renumber_lit(l, &map)).collect(),
                    probability,
                })
                .collect();
            for o in &opts {
                for l in &o.literals {
                    if o.literals.contains(&l.negate()) {
                        return Err(semantic(
                            span,
                            format!(
                                "effect of `{}` asserts both polarities of `{}`",
                                ga.name,
                                fact_names[l.fact.index()]
                            ),
                        ));
                    }
                }
            }
            let outcome = StochasticFormula::new(opts).map_err(|e| semantic(span, format!("in `{}`: {e}", ga.name)))?;
            effects.push(ConditionalEffect {
                condition: Guard::new(renumber(&cond, &map)),
                outcome,
            });
        }
        check_static_mutex(&ga.name, &pre, &effects, &fact_names, ga.span)?;
        let observes: Vec<FactId> = ga.observes.iter().map(|&o| FactId(map[o as usize])).collect();
        let action = match ga.kind {
            ActionKind::Actuation => Action::actuation(ga.name, pre, effects),
            ActionKind::Sensing => Action::sensing(ga.name, pre, observes),
            ActionKind::Combined => Action::combined(ga.name, pre, effects, observes),
        };
        actions.push(action);
        spans.push(Some(ga.span));
    }

    let mut known: Vec<Literal> = known_true
        .into_iter()
        .map(|id| Literal::pos(FactId(map[id as usize])))
        .collect();
    known.sort_unstable();
    known.dedup();
    let mut stoch = Vec::new();
    for options in stochastic {
        let span = options.first().map(|o| o.2).unwrap_or_default();
        let opts = options
            .into_iter()
            .map(|(probability, ls, _)| StochasticOption {
                literals: ls.into_iter().map(|l| renumber_lit(l, &map)).collect(),
                probability,
            })
            .collect();
        stoch.push(StochasticFormula::new(opts).map_err(|e| semantic(span, format!("in `:init`: {e}")))?);
    }
    let initial = InitialBelief {
        known,
        constraints: constraints.iter().map(|c| renumber(c, &map)).collect(),
        stochastic: stoch,
    };
    let goal = renumber(&goal, &map);
    let mut problem = Problem::new(p.name.clone(), d.name.clone(), fact_names, actions, initial, goal)?;
    problem.action_spans = spans;
    Ok(problem)
}

/// Reject effect pairs that always fire together (their conditions follow from
/// the precondition) and may write opposite literals.
fn check_static_mutex(
    name: &str,
    pre: &Formula,
    effects: &[ConditionalEffect],
    fact_names: &[String],
    span: Span,
) -> Result<(), ParseError> {
    let pre_lits = pre.conjunctive_literals().unwrap_or_default();
    let always = |e: &ConditionalEffect| match e.condition.literals() {
        Some(ls) => ls.iter().all(|l| pre_lits.contains(l)),
        None => false,
    };
    for (i, a) in effects.iter().enumerate() {
        if !always(a) {
            continue;
        }
        for b in effects.iter().skip(i + 1) {
            if !always(b) {
                continue;
            }
            for oa in &a.outcome.options {
                for ob in &b.outcome.options {
                    if let Some(l) = oa.literals.iter().find(|l| ob.literals.contains(&l.negate())) {
                        return Err(semantic(
                            span,
                            format!(
                                "effects of `{name}` may assert both polarities of `{}`",
                                fact_names[l.fact.index()]
                            ),
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

//! Small complete satisfiability search: Tseitin encoding into CNF and DPLL
//! with two watched literals and chronological backtracking.

use crate::model::{Formula, Literal};

/// CNF over variables `1..=num_vars`; literals are signed variable indices.
/// Fact `f` maps to variable `f + 1`; later variables are auxiliary.
#[derive(Debug, Clone, Default)]
pub struct Cnf {
    num_vars: u32,
    clauses: Vec<Vec<i32>>,
    trivially_unsat: bool,
    true_var: Option<i32>,
}

impl Cnf {
    pub fn new(num_facts: usize) -> Self {
        Cnf {
            num_vars: num_facts as u32,
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    fn fresh(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    fn lit(&mut self, l: Literal) -> i32 {
        let v = l.fact.0 as i32 + 1;
        if v as u32 > self.num_vars {
            self.num_vars = v as u32;
        }
        if l.positive {
            v
        } else {
            -v
        }
    }

    pub fn add_clause(&mut self, mut c: Vec<i32>) {
        c.sort_unstable_by_key(|l| (l.abs(), *l));
        c.dedup();
        if c.windows(2).any(|w| w[0] == -w[1]) {
            return;
        }
        if c.is_empty() {
            self.trivially_unsat = true;
        }
        self.clauses.push(c);
    }

    fn constant_true(&mut self) -> i32 {
        if let Some(t) = self.true_var {
            return t;
        }
        let t = self.fresh();
        self.clauses.push(vec![t]);
        self.true_var = Some(t);
        t
    }

    /// Variable equivalent to `f` under the added definitions.
    pub fn encode(&mut self, f: &Formula) -> i32 {
        match f {
            Formula::True => self.constant_true(),
            Formula::False => -self.constant_true(),
            Formula::Lit(l) => self.lit(*l),
            Formula::Not(g) => -self.encode(g),
            Formula::And(gs) => {
                let cs: Vec<i32> = gs.iter().map(|g| self.encode(g)).collect();
                let t = self.fresh();
                for &c in &cs {
                    self.add_clause(vec![-t, c]);
                }
                let mut back: Vec<i32> = cs.iter().map(|c| -c).collect();
                back.push(t);
                self.add_clause(back);
                t
            }
            Formula::Or(gs) => {
                let cs: Vec<i32> = gs.iter().map(|g| self.encode(g)).collect();
                let t = self.fresh();
                for &c in &cs {
                    self.add_clause(vec![-c, t]);
                }
                let mut fwd = cs.clone();
                fwd.push(-t);
                self.add_clause(fwd);
                t
            }
            Formula::OneOf(_) => {
                let expanded = f.nnf();
                self.encode(&expanded)
            }
        }
    }

    /// Constrain the CNF so that `f` holds, avoiding auxiliary variables for
    /// top-level conjunctions, clauses and exactly-one constraints.
    pub fn assert_formula(&mut self, f: &Formula) {
        match f {
            Formula::True => {}
            Formula::False => self.add_clause(Vec::new()),
            Formula::Lit(l) => {
                let x = self.lit(*l);
                self.add_clause(vec![x]);
            }
            Formula::And(gs) => gs.iter().for_each(|g| self.assert_formula(g)),
            Formula::OneOf(ls) => {
                let xs: Vec<i32> = ls.iter().map(|&l| self.lit(l)).collect();
                self.add_clause(xs.clone());
                for i in 0..xs.len() {
                    for j in (i + 1)..xs.len() {
                        self.add_clause(vec![-xs[i], -xs[j]]);
                    }
                }
            }
            Formula::Or(gs) => {
                let c: Vec<i32> = gs
                    .iter()
                    .map(|g| match g {
                        Formula::Lit(l) => self.lit(*l),
                        other => self.encode(other),
                    })
                    .collect();
                self.add_clause(c);
            }
            Formula::Not(g) => match &**g {
                Formula::Or(hs) => hs.iter().for_each(|h| self.assert_formula(&Formula::not(h.clone()))),
                _ => {
                    let x = self.encode(g);
                    self.add_clause(vec![-x]);
                }
            },
        }
    }

    /// A satisfying assignment indexed by variable (index 0 unused), if any.
    pub fn solve(&self) -> Option<Vec<bool>> {
        if self.trivially_unsat {
            return None;
        }
        Solver::new(self).run()
    }
}

pub fn satisfiable(f: &Formula, num_facts: usize) -> bool {
    let mut cnf = Cnf::new(num_facts);
    cnf.assert_formula(f);
    cnf.solve().is_some()
}

/// Whether every model of `premise` satisfies `conclusion`.
pub fn entails_formula(premise: &Formula, conclusion: &Formula, num_facts: usize) -> bool {
    match conclusion {
        Formula::True => return true,
        Formula::False => return !satisfiable(premise, num_facts),
        _ => {}
    }
    let mut cnf = Cnf::new(num_facts);
    cnf.assert_formula(premise);
    cnf.assert_formula(&Formula::not(conclusion.clone()));
    cnf.solve().is_none()
}

const UNASSIGNED: i8 = 0;

struct Solver {
    clauses: Vec<Vec<i32>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<i32>,
    /// (trail length before the decision, decided literal, both phases tried)
    decisions: Vec<(usize, i32, bool)>,
    head: usize,
    order: Vec<u32>,
    units: Vec<i32>,
    empty_clause: bool,
}

#[inline]
fn widx(l: i32) -> usize {
    let v = l.unsigned_abs() as usize;
    2 * v + usize::from(l < 0)
}

impl Solver {
    fn new(cnf: &Cnf) -> Self {
        let n = cnf.num_vars as usize;
        let mut watches = vec![Vec::new(); 2 * n + 2];
        let mut occurrences = vec![0u32; n + 1];
        let mut clauses = Vec::new();
        let mut units = Vec::new();
        let mut empty_clause = false;
        for c in &cnf.clauses {
            for &l in c {
                occurrences[l.unsigned_abs() as usize] += 1;
            }
            match c.len() {
                0 => empty_clause = true,
                1 => units.push(c[0]),
                _ => {
                    let id = clauses.len();
                    watches[widx(c[0])].push(id);
                    watches[widx(c[1])].push(id);
                    clauses.push(c.clone());
                }
            }
        }
        let mut order: Vec<u32> = (1..=n as u32).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(occurrences[v as usize]));
        Solver {
            clauses,
            watches,
            value: vec![UNASSIGNED; n + 1],
            trail: Vec::new(),
            decisions: Vec::new(),
            head: 0,
            order,
            units,
            empty_clause,
        }
    }

    #[inline]
    fn lit_value(&self, l: i32) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l < 0 {
            -v
        } else {
            v
        }
    }

    fn assign(&mut self, l: i32) {
        self.value[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
        self.trail.push(l);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let l = self.trail[self.head];
            self.head += 1;
            let falsified = -l;
            let mut ws = std::mem::take(&mut self.watches[widx(falsified)]);
            let mut i = 0;
            let mut conflict = false;
            while i < ws.len() {
                let cid = ws[i];
                let c = &mut self.clauses[cid];
                if c[0] == falsified {
                    c.swap(0, 1);
                }
                let other = c[0];
                let other_val = {
                    let v = self.value[other.unsigned_abs() as usize];
                    if other < 0 {
                        -v
                    } else {
                        v
                    }
                };
                if other_val == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.len() {
                    let x = c[k];
                    let xv = {
                        let v = self.value[x.unsigned_abs() as usize];
                        if x < 0 {
                            -v
                        } else {
                            v
                        }
                    };
                    if xv != -1 {
                        c.swap(1, k);
                        let nw = c[1];
                        self.watches[widx(nw)].push(cid);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if other_val == -1 {
                    conflict = true;
                    break;
                }
                self.assign(other);
                i += 1;
            }
            let slot = &mut self.watches[widx(falsified)];
            ws.append(slot);
            *slot = ws;
            if conflict {
                return false;
            }
        }
        true
    }

    fn backtrack(&mut self) -> bool {
        while let Some((len, lit, flipped)) = self.decisions.pop() {
            for &l in &self.trail[len..] {
                self.value[l.unsigned_abs() as usize] = UNASSIGNED;
            }
            self.trail.truncate(len);
            self.head = len;
            if !flipped {
                self.decisions.push((len, -lit, true));
                self.assign(-lit);
                return true;
            }
        }
        false
    }

    fn run(mut self) -> Option<Vec<bool>> {
        if self.empty_clause {
            return None;
        }
        for u in std::mem::take(&mut self.units) {
            match self.lit_value(u) {
                1 => {}
                -1 => return None,
                _ => self.assign(u),
            }
        }
        let mut cursor = 0;
        loop {
            if !self.propagate() {
                if !self.backtrack() {
                    return None;
                }
                cursor = 0;
                continue;
            }
            while cursor < self.order.len() && self.value[self.order[cursor] as usize] != UNASSIGNED {
                cursor += 1;
            }
            if cursor == self.order.len() {
                return Some(self.value.iter().map(|&v| v == 1).collect());
            }
            let lit = -(self.order[cursor] as i32);
            self.decisions.push((self.trail.len(), lit, false));
            self.assign(lit);
        }
    }
}

//! Reduction of lax team semantics to propositional satisfiability.
//!
//! Each node `ν` gets one variable per candidate row over `fr(ν)`, true when
//! the row belongs to the team reaching `ν`. Splits and choice functions
//! become free variables, and every child team is defined as exactly the
//! image of its parent under the chosen operation.

use std::collections::HashMap;

use varisat::{ExtendFormula, Lit, Solver};

use super::program::{tuples, CTerm, Kind, Program, View};
use super::search::Exhausted;
use crate::structures::Elem;

struct Encoder<'a, 'm> {
    prog: &'a Program,
    view: &'a View<'m>,
    solver: Solver<'static>,
    vars: u64,
    max: u64,
    scratch: Vec<Elem>,
}

/// Rows of one node's team together with their membership literals.
struct Table {
    rows: Vec<Vec<Elem>>,
    lits: Vec<Lit>,
}

impl<'a, 'm> Encoder<'a, 'm> {
    fn fresh(&mut self) -> Result<Lit, Exhausted> {
        self.vars += 1;
        if self.vars > self.max {
            return Err(Exhausted);
        }
        Ok(self.solver.new_lit())
    }

    fn clause(&mut self, lits: &[Lit]) {
        self.solver.add_clause(lits);
    }

    /// Loads a row over `fr` into the full-width scratch buffer.
    fn load(&mut self, fr: &[usize], row: &[Elem]) {
        fr.iter().zip(row).for_each(|(&s, &a)| self.scratch[s] = a);
    }

    fn project(&self, fr: &[usize]) -> Vec<Elem> {
        fr.iter().map(|&s| self.scratch[s]).collect()
    }

    fn tuple(&self, ts: &[CTerm]) -> Vec<Elem> {
        self.view.tuple(ts, &self.scratch)
    }

    /// Values of `ts` on each row of the table.
    fn values(&mut self, node: usize, table: &Table, ts: &[CTerm]) -> Vec<Vec<Elem>> {
        let fr = &self.prog.nodes[node].fr;
        table
            .rows
            .iter()
            .map(|r| {
                fr.iter().zip(r).for_each(|(&s, &a)| self.scratch[s] = a);
                self.view.tuple(ts, &self.scratch)
            })
            .collect()
    }

    /// `T[child, r′] ↔ ⋁ sources(r′)` and recursion into the child.
    fn define(&mut self, child: usize, sources: Vec<(Vec<Elem>, Lit)>) -> Result<(), Exhausted> {
        let mut index: HashMap<Vec<Elem>, usize> = HashMap::new();
        let mut grouped: Vec<(Vec<Elem>, Vec<Lit>)> = Vec::new();
        for (row, lit) in sources {
            let i = *index.entry(row.clone()).or_insert_with(|| {
                grouped.push((row, Vec::new()));
                grouped.len() - 1
            });
            grouped[i].1.push(lit);
        }
        let mut table = Table { rows: Vec::with_capacity(grouped.len()), lits: Vec::with_capacity(grouped.len()) };
        for (row, lits) in grouped {
            let t = if lits.len() == 1 {
                lits[0]
            } else {
                let t = self.fresh()?;
                let mut back = vec![!t];
                for &l in &lits {
                    self.clause(&[!l, t]);
                    back.push(l);
                }
                self.clause(&back);
                t
            };
            table.rows.push(row);
            table.lits.push(t);
        }
        self.encode(child, table)
    }

    /// Sources for a child obtained by projecting the parent rows, each
    /// guarded by the given literal.
    fn projected(&mut self, node: usize, child: usize, table: &Table, guards: &[Lit]) -> Vec<(Vec<Elem>, Lit)> {
        let fr = self.prog.nodes[node].fr.clone();
        let cfr = self.prog.nodes[child].fr.clone();
        table
            .rows
            .iter()
            .zip(guards)
            .map(|(r, &g)| {
                self.load(&fr, r);
                (self.project(&cfr), g)
            })
            .collect()
    }

    /// `t̄₁ ⊆ t̄₂` on the rows of a table.
    fn inclusion(&mut self, table: &Table, left: &[Vec<Elem>], right: &[Vec<Elem>]) {
        let mut by_value: HashMap<&[Elem], Vec<Lit>> = HashMap::new();
        for (v, &l) in right.iter().zip(&table.lits) {
            by_value.entry(v.as_slice()).or_default().push(l);
        }
        for (v, &l) in left.iter().zip(&table.lits) {
            let mut c = vec![!l];
            if let Some(ls) = by_value.get(v.as_slice()) {
                c.extend(ls);
            }
            self.clause(&c);
        }
    }

    /// Membership literals for each value of `values`, true iff some row of
    /// the table takes that value: `I[v] ↔ ⋁ {T[r] : value(r) = v}`.
    fn image(&mut self, table: &Table, values: &[Vec<Elem>], domain: &[Vec<Elem>]) -> Result<Vec<Lit>, Exhausted> {
        let mut by_value: HashMap<&[Elem], Vec<Lit>> = HashMap::new();
        for (v, &l) in values.iter().zip(&table.lits) {
            by_value.entry(v.as_slice()).or_default().push(l);
        }
        let mut out = Vec::with_capacity(domain.len());
        for v in domain {
            let i = self.fresh()?;
            let ls = by_value.get(v.as_slice()).cloned().unwrap_or_default();
            let mut back = vec![!i];
            for &l in &ls {
                self.clause(&[!l, i]);
                back.push(l);
            }
            self.clause(&back);
            out.push(i);
        }
        Ok(out)
    }

    fn split(&mut self, table: &Table) -> Result<(Vec<Lit>, Vec<Lit>), Exhausted> {
        let mut left = Vec::with_capacity(table.lits.len());
        let mut right = Vec::with_capacity(table.lits.len());
        for &t in &table.lits {
            let (l, r) = (self.fresh()?, self.fresh()?);
            self.clause(&[!l, t]);
            self.clause(&[!r, t]);
            self.clause(&[!t, l, r]);
            left.push(l);
            right.push(r);
        }
        Ok((left, right))
    }

    fn encode(&mut self, node: usize, table: Table) -> Result<(), Exhausted> {
        let prog = self.prog;
        let n = &prog.nodes[node];
        let fr = &n.fr;
        if let Kind::Eq(..) | Kind::NotEq(..) | Kind::Rel(..) | Kind::NotRel(..) = n.kind {
            for (r, &t) in table.rows.iter().zip(&table.lits) {
                self.load(fr, r);
                if self.view.literal(&n.kind, &self.scratch) == Some(false) {
                    self.clause(&[!t]);
                }
            }
            return Ok(());
        }
        match &n.kind {
            Kind::Inc(a, b) => {
                let (va, vb) = (self.values(node, &table, a), self.values(node, &table, b));
                self.inclusion(&table, &va, &vb);
            }
            Kind::EquiExt(a, b) => {
                let (va, vb) = (self.values(node, &table, a), self.values(node, &table, b));
                self.inclusion(&table, &va, &vb);
                self.inclusion(&table, &vb, &va);
            }
            Kind::Exc(a, b) => {
                let (va, vb) = (self.values(node, &table, a), self.values(node, &table, b));
                let mut left: HashMap<&[Elem], Vec<Lit>> = HashMap::new();
                for (v, &l) in va.iter().zip(&table.lits) {
                    left.entry(v.as_slice()).or_default().push(l);
                }
                let mut right: HashMap<&[Elem], Vec<Lit>> = HashMap::new();
                for (v, &l) in vb.iter().zip(&table.lits) {
                    right.entry(v.as_slice()).or_default().push(l);
                }
                for (v, ls) in &left {
                    let Some(rs) = right.get(v) else { continue };
                    let (j1, j2) = (self.fresh()?, self.fresh()?);
                    ls.iter().for_each(|&l| self.solver.add_clause(&[!l, j1]));
                    rs.iter().for_each(|&r| self.solver.add_clause(&[!r, j2]));
                    self.clause(&[!j1, !j2]);
                }
            }
            Kind::Dep(t) => {
                let vals = self.values(node, &table, std::slice::from_ref(t));
                let mut seen: HashMap<&[Elem], Lit> = HashMap::new();
                for (v, &l) in vals.iter().zip(&table.lits) {
                    let c = match seen.get(v.as_slice()) {
                        Some(&c) => c,
                        None => {
                            let c = self.fresh()?;
                            seen.insert(v.as_slice(), c);
                            c
                        }
                    };
                    self.clause(&[!l, c]);
                }
                let cs: Vec<Lit> = seen.into_values().collect();
                for i in 0..cs.len() {
                    for j in i + 1..cs.len() {
                        self.clause(&[!cs[i], !cs[j]]);
                    }
                }
            }
            Kind::And(a, b) => {
                let sa = self.projected(node, *a, &table, &table.lits);
                let sb = self.projected(node, *b, &table, &table.lits);
                self.define(*a, sa)?;
                self.define(*b, sb)?;
            }
            Kind::Or(a, b) => {
                let (left, right) = self.split(&table)?;
                let sa = self.projected(node, *a, &table, &left);
                let sb = self.projected(node, *b, &table, &right);
                self.define(*a, sa)?;
                self.define(*b, sb)?;
            }
            Kind::Tvp { left: a, right: b, preserved } => {
                let (left, right) = self.split(&table)?;
                let (ne_l, ne_r) = (self.fresh()?, self.fresh()?);
                left.iter().for_each(|&l| self.solver.add_clause(&[!l, ne_l]));
                right.iter().for_each(|&r| self.solver.add_clause(&[!r, ne_r]));
                for ts in preserved {
                    let vals = self.values(node, &table, ts);
                    let mut by_value: HashMap<&[Elem], Vec<usize>> = HashMap::new();
                    for (i, v) in vals.iter().enumerate() {
                        by_value.entry(v.as_slice()).or_default().push(i);
                    }
                    for (i, v) in vals.iter().enumerate() {
                        let same = &by_value[v.as_slice()];
                        for side in [&left, &right] {
                            let mut c = vec![!ne_l, !ne_r, !table.lits[i]];
                            c.extend(same.iter().map(|&j| side[j]));
                            self.clause(&c);
                        }
                    }
                }
                let sa = self.projected(node, *a, &table, &left);
                let sb = self.projected(node, *b, &table, &right);
                self.define(*a, sa)?;
                self.define(*b, sb)?;
            }
            Kind::IOr(a, b) => {
                let choice = self.fresh()?;
                let mut guards = [Vec::new(), Vec::new()];
                for &t in &table.lits {
                    for (side, g) in [choice, !choice].into_iter().enumerate() {
                        let aux = self.fresh()?;
                        self.clause(&[!aux, t]);
                        self.clause(&[!aux, g]);
                        self.clause(&[aux, !t, !g]);
                        guards[side].push(aux);
                    }
                }
                let sa = self.projected(node, *a, &table, &guards[0]);
                let sb = self.projected(node, *b, &table, &guards[1]);
                self.define(*a, sa)?;
                self.define(*b, sb)?;
            }
            Kind::Exists(x, b) | Kind::Forall(x, b) => {
                let universal = matches!(n.kind, Kind::Forall(..));
                let cfr = prog.nodes[*b].fr.clone();
                let mut sources = Vec::with_capacity(table.rows.len() * self.view.n);
                for (r, &t) in table.rows.iter().zip(&table.lits) {
                    let mut witnesses = vec![!t];
                    for a in 0..self.view.n {
                        self.load(fr, r);
                        self.scratch[*x] = a as Elem;
                        let lit = if universal {
                            t
                        } else {
                            let e = self.fresh()?;
                            self.clause(&[!e, t]);
                            witnesses.push(e);
                            e
                        };
                        sources.push((self.project(&cfr), lit));
                    }
                    if !universal {
                        self.clause(&witnesses);
                    }
                }
                self.define(*b, sources)?;
            }
            Kind::Store { from, to, body } => {
                let cfr = prog.nodes[*body].fr.clone();
                let mut sources = Vec::with_capacity(table.rows.len());
                for (r, &t) in table.rows.iter().zip(&table.lits) {
                    self.load(fr, r);
                    let vals = self.tuple(from);
                    to.iter().zip(vals).for_each(|(&u, a)| self.scratch[u] = a);
                    sources.push((self.project(&cfr), t));
                }
                self.define(*body, sources)?;
            }
            Kind::Restricted { kind, vars, bound, body } => {
                let domain = tuples(self.view.n, vars.len());
                let vals = self.values(node, &table, bound);
                let image = self.image(&table, &vals, &domain)?;
                let allowed: Vec<Lit> = image.iter().map(|&i| if kind.is_complement() { !i } else { i }).collect();
                let cfr = prog.nodes[*body].fr.clone();
                let mut sources = Vec::with_capacity(table.rows.len() * domain.len());
                for (r, &t) in table.rows.iter().zip(&table.lits) {
                    let mut witnesses = vec![!t];
                    for (v, &ok) in domain.iter().zip(&allowed) {
                        self.load(fr, r);
                        vars.iter().zip(v).for_each(|(&x, &a)| self.scratch[x] = a);
                        let e = self.fresh()?;
                        self.clause(&[!e, t]);
                        self.clause(&[!e, ok]);
                        if kind.is_existential() {
                            witnesses.push(e);
                        } else {
                            self.clause(&[e, !t, !ok]);
                        }
                        sources.push((self.project(&cfr), e));
                    }
                    if kind.is_existential() {
                        self.clause(&witnesses);
                    }
                }
                self.define(*body, sources)?;
            }
            _ => unreachable!("literals handled above"),
        }
        Ok(())
    }
}

/// Decides the root formula on the given full-width rows. Returns the
/// verdict and the number of propositional variables used.
pub(crate) fn decide(prog: &Program, view: &View<'_>, rows: &[Vec<Elem>], max: u64) -> Result<(bool, u64), Exhausted> {
    let mut enc = Encoder { prog, view, solver: Solver::new(), vars: 0, max, scratch: vec![0; prog.width()] };
    let root = prog.root;
    let fr = prog.nodes[root].fr.clone();
    let mut sources = Vec::with_capacity(rows.len());
    let top = enc.fresh()?;
    enc.clause(&[top]);
    for r in rows {
        sources.push((fr.iter().map(|&s| r[s]).collect::<Vec<_>>(), top));
    }
    enc.define(root, sources)?;
    let verdict = enc.solver.solve().expect("solver without proof output cannot fail");
    Ok((verdict, enc.vars))
}

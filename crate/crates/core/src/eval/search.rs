//! Direct search over covers and choice functions, following the
//! definition of lax team semantics clause by clause.

use std::collections::{BTreeSet, HashMap};

use super::program::{tuples, CTerm, Kind, Program, View};
use super::Gates;
use crate::structures::Elem;
use crate::syntax::Restriction;

type Rows = Vec<Vec<Elem>>;

pub(crate) struct Exhausted;

pub(crate) struct Search<'a, 'm> {
    prog: &'a Program,
    view: &'a View<'m>,
    gates: Gates,
    memo: HashMap<(usize, Rows), bool>,
    pub used: u64,
    max: u64,
}

fn normalize(mut rows: Rows) -> Rows {
    rows.sort_unstable();
    rows.dedup();
    rows
}

/// Advances a mixed-radix counter; returns false after the last value.
fn step(counter: &mut [usize], radix: &[usize]) -> bool {
    for i in (0..counter.len()).rev() {
        counter[i] += 1;
        if counter[i] < radix[i] {
            return true;
        }
        counter[i] = 0;
    }
    false
}

impl<'a, 'm> Search<'a, 'm> {
    pub fn new(prog: &'a Program, view: &'a View<'m>, gates: Gates, max: u64) -> Self {
        Search { prog, view, gates, memo: HashMap::new(), used: 0, max }
    }

    fn tick(&mut self) -> Result<(), Exhausted> {
        self.used += 1;
        if self.used > self.max {
            Err(Exhausted)
        } else {
            Ok(())
        }
    }

    pub fn sat(&mut self, node: usize, rows: Rows) -> Result<bool, Exhausted> {
        if rows.is_empty() {
            return Ok(true);
        }
        let rows = if self.gates.locality {
            let fr = &self.prog.nodes[node].fr;
            let width = self.prog.width();
            normalize(
                rows.into_iter()
                    .map(|r| {
                        let mut out = vec![0; width];
                        fr.iter().for_each(|&s| out[s] = r[s]);
                        out
                    })
                    .collect(),
            )
        } else {
            rows
        };
        let key = (node, rows);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.tick()?;
        let v = self.eval(node, &key.1)?;
        self.memo.insert(key, v);
        Ok(v)
    }

    fn images(&self, ts: &[CTerm], rows: &Rows) -> BTreeSet<Vec<Elem>> {
        rows.iter().map(|r| self.view.tuple(ts, r)).collect()
    }

    fn all_rows(&self, node: usize, rows: &Rows) -> bool {
        let mut scratch = Vec::new();
        rows.iter().all(|r| {
            scratch.clone_from(r);
            self.view.tarski(self.prog, node, &mut scratch)
        })
    }

    fn eval(&mut self, node: usize, rows: &Rows) -> Result<bool, Exhausted> {
        let n = &self.prog.nodes[node];
        if self.view.literal(&n.kind, &rows[0]).is_some() {
            return Ok(rows.iter().all(|r| self.view.literal(&n.kind, r) == Some(true)));
        }
        if self.gates.flatness && n.first_order {
            return Ok(self.all_rows(node, rows));
        }
        match &n.kind {
            Kind::Inc(a, b) => Ok(self.images(a, rows).is_subset(&self.images(b, rows))),
            Kind::Exc(a, b) => Ok(self.images(a, rows).is_disjoint(&self.images(b, rows))),
            Kind::EquiExt(a, b) => Ok(self.images(a, rows) == self.images(b, rows)),
            Kind::Dep(t) => Ok(self.images(std::slice::from_ref(t), rows).len() <= 1),
            Kind::And(a, b) => {
                let (a, b) = (*a, *b);
                Ok(self.sat(a, rows.clone())? && self.sat(b, rows.clone())?)
            }
            Kind::IOr(a, b) => {
                let (a, b) = (*a, *b);
                Ok(self.sat(a, rows.clone())? || self.sat(b, rows.clone())?)
            }
            Kind::Or(a, b) => {
                let (a, b) = (*a, *b);
                self.split(rows, a, b, &[])
            }
            Kind::Tvp { left, right, preserved } => {
                let (a, b) = (*left, *right);
                let preserved = preserved.clone();
                self.split(rows, a, b, &preserved)
            }
            Kind::Exists(x, b) => {
                let (x, b) = (*x, *b);
                let values: Vec<Vec<Elem>> = tuples(self.view.n, 1);
                let singletons = self.gates.downward && self.prog.nodes[b].downward;
                self.choose(rows, &[x], &values, b, singletons)
            }
            Kind::Forall(x, b) => {
                let (x, b) = (*x, *b);
                let mut out = Vec::with_capacity(rows.len() * self.view.n);
                for r in rows {
                    for a in 0..self.view.n {
                        let mut row = r.clone();
                        row[x] = a as Elem;
                        out.push(row);
                    }
                }
                self.sat(b, normalize(out))
            }
            Kind::Store { from, to, body } => {
                let body = *body;
                let out = rows
                    .iter()
                    .map(|r| {
                        let vals = self.view.tuple(from, r);
                        let mut row = r.clone();
                        to.iter().zip(vals).for_each(|(&u, a)| row[u] = a);
                        row
                    })
                    .collect();
                self.sat(body, normalize(out))
            }
            Kind::Restricted { kind, vars, bound, body } => {
                let (kind, body) = (*kind, *body);
                let vars = vars.clone();
                let image = self.images(bound, rows);
                let allowed: Vec<Vec<Elem>> = tuples(self.view.n, vars.len())
                    .into_iter()
                    .filter(|v| image.contains(v) != kind.is_complement())
                    .collect();
                if kind.is_existential() {
                    if allowed.is_empty() {
                        return Ok(false);
                    }
                    let singletons = self.gates.downward
                        && kind == Restriction::ExistsExcl
                        && self.prog.nodes[body].downward;
                    self.choose(rows, &vars, &allowed, body, singletons)
                } else {
                    let mut out = Vec::with_capacity(rows.len() * allowed.len());
                    for r in rows {
                        for v in &allowed {
                            let mut row = r.clone();
                            vars.iter().zip(v).for_each(|(&x, &a)| row[x] = a);
                            out.push(row);
                        }
                    }
                    self.sat(body, normalize(out))
                }
            }
            _ => unreachable!("literal handled above"),
        }
    }

    /// Searches for `F : X → P*(values)` such that `X[F/x̄]` satisfies `body`,
    /// trying choice sets in lexicographic order of their bitmasks.
    fn choose(
        &mut self,
        rows: &Rows,
        vars: &[usize],
        values: &[Vec<Elem>],
        body: usize,
        singletons: bool,
    ) -> Result<bool, Exhausted> {
        if values.len() >= 48 {
            // Too many candidate sets to index by bitmask; such searches are
            // beyond any budget anyway.
            return Err(Exhausted);
        }
        let choices = if singletons { values.len() } else { (1usize << values.len()) - 1 };
        let mask_of = |c: usize| if singletons { 1u64 << c } else { c as u64 + 1 };
        let radix = vec![choices; rows.len()];
        let mut counter = vec![0; rows.len()];
        loop {
            self.tick()?;
            let mut out = Vec::new();
            for (r, &c) in rows.iter().zip(&counter) {
                let mask = mask_of(c);
                for (i, v) in values.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        let mut row = r.clone();
                        vars.iter().zip(v).for_each(|(&x, &a)| row[x] = a);
                        out.push(row);
                    }
                }
            }
            if self.sat(body, normalize(out))? {
                return Ok(true);
            }
            if !step(&mut counter, &radix) {
                return Ok(false);
            }
        }
    }

    /// Searches for a cover `Y ∪ Y′ = X` by labelling each row left, right or
    /// both. With preserved tuples, two nonempty sides must keep the images.
    fn split(&mut self, rows: &Rows, a: usize, b: usize, preserved: &[Vec<CTerm>]) -> Result<bool, Exhausted> {
        const LEFT: usize = 0;
        const RIGHT: usize = 1;
        let plain = preserved.is_empty();
        let nodes = &self.prog.nodes;
        let partition = plain && self.gates.downward && (nodes[a].downward || nodes[b].downward);
        // rows a flat side cannot take are forced to the other side
        let mut options: Vec<Vec<usize>> = vec![if partition { vec![0, 1] } else { vec![0, 1, 2] }; rows.len()];
        if self.gates.flatness {
            for (side, other) in [(a, RIGHT), (b, LEFT)] {
                if self.prog.nodes[side].first_order {
                    let mut scratch = Vec::new();
                    for (i, r) in rows.iter().enumerate() {
                        scratch.clone_from(r);
                        if !self.view.tarski(self.prog, side, &mut scratch) {
                            options[i].retain(|&l| l == other);
                        }
                    }
                }
            }
            if options.iter().any(Vec::is_empty) {
                return Ok(false);
            }
        }
        let images: Vec<BTreeSet<Vec<Elem>>> = preserved.iter().map(|t| self.images(t, rows)).collect();
        let radix: Vec<usize> = options.iter().map(Vec::len).collect();
        let mut counter = vec![0; rows.len()];
        loop {
            self.tick()?;
            let mut left = Vec::new();
            let mut right = Vec::new();
            for (i, r) in rows.iter().enumerate() {
                let label = options[i][counter[i]];
                if label != RIGHT {
                    left.push(r.clone());
                }
                if label != LEFT {
                    right.push(r.clone());
                }
            }
            let keeps = left.is_empty()
                || right.is_empty()
                || preserved.iter().zip(&images).all(|(t, img)| {
                    self.images(t, &left) == *img && self.images(t, &right) == *img
                });
            if keeps && self.sat(a, left)? && self.sat(b, right)? {
                return Ok(true);
            }
            if !step(&mut counter, &radix) {
                return Ok(false);
            }
        }
    }
}

//! Existential second-order logic over finite models: brute-force
//! enumeration of the quantified relations, Tarski semantics for the matrix.

use std::collections::{BTreeMap, HashMap};

use crate::eval::{EvalBudget, EvalError, EvalOutcome};
use crate::structures::{index_tuple, tuple_index, Elem, Model, Relation};
use crate::syntax::{free_variables, EsoFormula, Formula, Term};

/// Interpretations of relation variables.
pub type RelAssignment = BTreeMap<String, Relation>;

enum Arg {
    Var(usize),
    Elem(Elem),
    App(Vec<Elem>, Vec<Arg>),
}

#[derive(Clone, Copy)]
enum Source {
    Fixed(usize),
    Quantified(usize),
}

enum Matrix {
    Eq(Arg, Arg, bool),
    Rel(Source, Vec<Arg>, bool),
    And(Box<Matrix>, Box<Matrix>),
    Or(Box<Matrix>, Box<Matrix>),
    Exists(usize, Box<Matrix>),
    Forall(usize, Box<Matrix>),
}

struct Compiled {
    matrix: Matrix,
    /// Vocabulary relations and free relation variables.
    fixed: Vec<Relation>,
    /// Slot count of each quantified relation variable.
    slots: Vec<usize>,
    arities: Vec<usize>,
    vars: usize,
    n: usize,
}

struct Builder<'a> {
    m: &'a Model,
    free: &'a RelAssignment,
    quantified: &'a [(String, usize)],
    fixed: Vec<Relation>,
    fixed_index: HashMap<String, usize>,
    vars: HashMap<String, usize>,
}

impl Builder<'_> {
    fn var(&mut self, x: &str) -> usize {
        let next = self.vars.len();
        *self.vars.entry(x.to_string()).or_insert(next)
    }

    fn arg(&mut self, t: &Term) -> Result<Arg, EvalError> {
        Ok(match t {
            Term::Var(x) => Arg::Var(self.var(x)),
            Term::Const(c) => Arg::Elem(self.m.constant(c).ok_or_else(|| EvalError::UnknownSymbol(c.clone()))?),
            Term::App(f, args) => {
                let fun = self.m.function(f).ok_or_else(|| EvalError::UnknownSymbol(f.clone()))?;
                if fun.arity() != args.len() {
                    return Err(EvalError::Invalid(format!("function `{f}` applied to {} arguments", args.len())));
                }
                Arg::App(fun.table().to_vec(), args.iter().map(|a| self.arg(a)).collect::<Result<_, _>>()?)
            }
        })
    }

    fn source(&mut self, name: &str, arity: usize) -> Result<Source, EvalError> {
        if let Some(i) = self.quantified.iter().position(|(p, _)| p == name) {
            return Ok(Source::Quantified(i));
        }
        if let Some(&i) = self.fixed_index.get(name) {
            return Ok(Source::Fixed(i));
        }
        let rel = match self.free.get(name) {
            Some(r) => r.clone(),
            None => self
                .m
                .relation(name)
                .cloned()
                .ok_or_else(|| EvalError::UnknownSymbol(name.to_string()))?,
        };
        if rel.arity() != arity {
            return Err(EvalError::Invalid(format!("relation `{name}` has arity {}, used with {arity}", rel.arity())));
        }
        self.fixed.push(rel);
        self.fixed_index.insert(name.to_string(), self.fixed.len() - 1);
        Ok(Source::Fixed(self.fixed.len() - 1))
    }

    fn build(&mut self, phi: &Formula) -> Result<Matrix, EvalError> {
        Ok(match phi {
            Formula::Eq(a, b) => Matrix::Eq(self.arg(a)?, self.arg(b)?, true),
            Formula::NotEq(a, b) => Matrix::Eq(self.arg(a)?, self.arg(b)?, false),
            Formula::Rel(r, ts) | Formula::NotRel(r, ts) => {
                let src = self.source(r, ts.len())?;
                let args = ts.iter().map(|t| self.arg(t)).collect::<Result<_, _>>()?;
                Matrix::Rel(src, args, matches!(phi, Formula::Rel(..)))
            }
            Formula::And(a, b) => Matrix::And(Box::new(self.build(a)?), Box::new(self.build(b)?)),
            Formula::Or(a, b) => Matrix::Or(Box::new(self.build(a)?), Box::new(self.build(b)?)),
            Formula::Exists(x, b) => {
                let v = self.var(x);
                Matrix::Exists(v, Box::new(self.build(b)?))
            }
            Formula::Forall(x, b) => {
                let v = self.var(x);
                Matrix::Forall(v, Box::new(self.build(b)?))
            }
            _ => return Err(EvalError::NotFirstOrder),
        })
    }
}

fn compile(m: &Model, phi: &EsoFormula, free: &RelAssignment) -> Result<Compiled, EvalError> {
    if let Some(x) = free_variables(&phi.matrix).into_iter().next() {
        return Err(EvalError::UnboundVariable(x));
    }
    for (name, arity) in &phi.free_relvars {
        match free.get(name) {
            None => return Err(EvalError::Invalid(format!("free relation variable `{name}` is not bound"))),
            Some(r) if r.arity() != *arity => {
                return Err(EvalError::Invalid(format!("`{name}` bound to a relation of arity {}", r.arity())))
            }
            Some(r) if r.bits().len() != m.size().pow(*arity as u32) => {
                return Err(EvalError::Invalid(format!("`{name}` bound over a different universe")))
            }
            _ => {}
        }
    }
    let n = m.size();
    let slots: Vec<usize> = phi.quantified.iter().map(|(_, k)| n.pow(*k as u32)).collect();
    if slots.iter().any(|&s| s >= 64) {
        return Err(EvalError::Invalid("quantified relation with more than 63 tuple slots".into()));
    }
    let mut b = Builder {
        m,
        free,
        quantified: &phi.quantified,
        fixed: Vec::new(),
        fixed_index: HashMap::new(),
        vars: HashMap::new(),
    };
    let matrix = b.build(&phi.matrix)?;
    Ok(Compiled {
        matrix,
        fixed: b.fixed,
        slots,
        arities: phi.quantified.iter().map(|(_, k)| *k).collect(),
        vars: b.vars.len(),
        n,
    })
}

struct Env<'a> {
    c: &'a Compiled,
    masks: &'a [u64],
    vals: Vec<Elem>,
}

impl Env<'_> {
    fn arg(&self, a: &Arg) -> Elem {
        match a {
            Arg::Var(v) => self.vals[*v],
            Arg::Elem(e) => *e,
            Arg::App(table, args) => {
                let idx = args.iter().fold(0, |acc, a| acc * self.c.n + self.arg(a) as usize);
                table[idx]
            }
        }
    }

    fn truth(&mut self, phi: &Matrix) -> bool {
        match phi {
            Matrix::Eq(a, b, pos) => (self.arg(a) == self.arg(b)) == *pos,
            Matrix::Rel(src, args, pos) => {
                let idx = args.iter().fold(0, |acc, a| acc * self.c.n + self.arg(a) as usize);
                let member = match *src {
                    Source::Fixed(i) => self.c.fixed[i].contains_index(idx),
                    Source::Quantified(i) => self.masks[i] >> idx & 1 == 1,
                };
                member == *pos
            }
            Matrix::And(a, b) => self.truth(a) && self.truth(b),
            Matrix::Or(a, b) => self.truth(a) || self.truth(b),
            Matrix::Exists(v, b) | Matrix::Forall(v, b) => {
                let universal = matches!(phi, Matrix::Forall(..));
                let saved = self.vals[*v];
                let mut out = universal;
                for a in 0..self.c.n {
                    self.vals[*v] = a as Elem;
                    if self.truth(b) != universal {
                        out = !universal;
                        break;
                    }
                }
                self.vals[*v] = saved;
                out
            }
        }
    }
}

/// Enumerates interpretations of the quantified relation variables as
/// bitmasks over their tuple slots, the first variable varying slowest and
/// each mask counting upwards. Returns the first satisfying interpretation.
fn search(c: &Compiled, nonempty: bool, max: u64) -> Result<(Option<Vec<u64>>, u64), EvalError> {
    let first = if nonempty { 1 } else { 0 };
    let mut masks = vec![first; c.slots.len()];
    let mut used = 0u64;
    loop {
        used += 1;
        if used > max {
            return Err(EvalError::BudgetExhausted(max));
        }
        let mut env = Env { c, masks: &masks, vals: vec![0; c.vars] };
        if env.truth(&c.matrix) {
            return Ok((Some(masks), used));
        }
        let mut i = masks.len();
        loop {
            if i == 0 {
                return Ok((None, used));
            }
            i -= 1;
            if masks[i] + 1 < 1u64 << c.slots[i] {
                masks[i] += 1;
                break;
            }
            masks[i] = first;
        }
    }
}

fn relation_of(c: &Compiled, i: usize, mask: u64) -> Relation {
    let (n, k) = (c.n, c.arities[i]);
    let tuples = (0..c.slots[i]).filter(|&s| mask >> s & 1 == 1).map(|s| index_tuple(n, k, s));
    let rel = Relation::from_tuples(n, k, tuples).expect("tuples within the universe");
    debug_assert!(rel.tuples().all(|t| mask >> tuple_index(n, &t) & 1 == 1));
    rel
}

/// Decides `M ⊨ Φ` with the free relation variables bound by `free`. The
/// budget counts interpretations tried.
pub fn eso_satisfies(
    m: &Model,
    phi: &EsoFormula,
    free: &RelAssignment,
    budget: &EvalBudget,
) -> Result<EvalOutcome, EvalError> {
    let c = compile(m, phi, free)?;
    let (found, used) = search(&c, false, budget.max_nodes)?;
    Ok(EvalOutcome { value: found.is_some(), nodes_used: used })
}

/// The least interpretation, in enumeration order, of the quantified
/// relation variables by nonempty relations that satisfies the matrix.
pub fn nonempty_witness_search(
    m: &Model,
    phi: &EsoFormula,
    free: &RelAssignment,
    budget: &EvalBudget,
) -> Result<Option<RelAssignment>, EvalError> {
    let c = compile(m, phi, free)?;
    let (found, _) = search(&c, true, budget.max_nodes)?;
    Ok(found.map(|masks| {
        phi.quantified
            .iter()
            .enumerate()
            .map(|(i, (name, _))| (name.clone(), relation_of(&c, i, masks[i])))
            .collect()
    }))
}

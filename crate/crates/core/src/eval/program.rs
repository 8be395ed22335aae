//! Compilation of formulas to an indexed node graph with variable slots.

use std::collections::{BTreeSet, HashMap};

use super::EvalError;
use crate::structures::{tuple_index, Elem, Function, Model, Relation};
use crate::syntax::{free_variables, relativize, Formula, Restriction, Term};

#[derive(Clone, Debug)]
pub(crate) enum CTerm {
    Var(usize),
    Const(usize),
    App(usize, Vec<CTerm>),
}

#[derive(Clone, Debug)]
pub(crate) enum Kind {
    Eq(CTerm, CTerm),
    NotEq(CTerm, CTerm),
    Rel(usize, Vec<CTerm>),
    NotRel(usize, Vec<CTerm>),
    Inc(Vec<CTerm>, Vec<CTerm>),
    Exc(Vec<CTerm>, Vec<CTerm>),
    EquiExt(Vec<CTerm>, Vec<CTerm>),
    And(usize, usize),
    Or(usize, usize),
    IOr(usize, usize),
    Exists(usize, usize),
    Forall(usize, usize),
    Dep(CTerm),
    Store { from: Vec<CTerm>, to: Vec<usize>, body: usize },
    Restricted { kind: Restriction, vars: Vec<usize>, bound: Vec<CTerm>, body: usize },
    Tvp { left: usize, right: usize, preserved: Vec<Vec<CTerm>> },
}

#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub kind: Kind,
    /// Slots of the free variables, ascending.
    pub fr: Vec<usize>,
    /// Built from literals, `∧`, `∨`, `∃`, `∀` only; hence flat.
    pub first_order: bool,
    /// Syntactically closed under subteams.
    pub downward: bool,
}

/// A formula compiled against a team domain. The first slots are the team
/// domain in order; bound variables not in the domain follow.
#[derive(Clone, Debug)]
pub(crate) struct Program {
    pub nodes: Vec<Node>,
    pub root: usize,
    pub slots: Vec<String>,
    pub domain_len: usize,
    rels: Vec<(String, usize)>,
    funcs: Vec<(String, usize)>,
    consts: Vec<String>,
}

struct Compiler {
    nodes: Vec<Node>,
    slots: Vec<String>,
    slot_of: HashMap<String, usize>,
    rels: Vec<(String, usize)>,
    funcs: Vec<(String, usize)>,
    consts: Vec<String>,
    native: bool,
}

fn intern(table: &mut Vec<(String, usize)>, name: &str, arity: usize) -> Result<usize, EvalError> {
    if let Some(i) = table.iter().position(|(n, _)| n == name) {
        if table[i].1 != arity {
            return Err(EvalError::Invalid(format!("symbol `{name}` used with arities {} and {arity}", table[i].1)));
        }
        return Ok(i);
    }
    table.push((name.to_string(), arity));
    Ok(table.len() - 1)
}

impl Compiler {
    fn slot(&mut self, name: &str) -> usize {
        if let Some(&i) = self.slot_of.get(name) {
            return i;
        }
        self.slots.push(name.to_string());
        self.slot_of.insert(name.to_string(), self.slots.len() - 1);
        self.slots.len() - 1
    }

    fn term(&mut self, t: &Term) -> Result<CTerm, EvalError> {
        Ok(match t {
            Term::Var(x) => CTerm::Var(self.slot(x)),
            Term::Const(c) => {
                let i = match self.consts.iter().position(|n| n == c) {
                    Some(i) => i,
                    None => {
                        self.consts.push(c.clone());
                        self.consts.len() - 1
                    }
                };
                CTerm::Const(i)
            }
            Term::App(f, args) => {
                let i = intern(&mut self.funcs, f, args.len())?;
                CTerm::App(i, args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?)
            }
        })
    }

    fn terms(&mut self, ts: &[Term]) -> Result<Vec<CTerm>, EvalError> {
        ts.iter().map(|t| self.term(t)).collect()
    }

    fn push(&mut self, phi: &Formula, kind: Kind) -> usize {
        let fr: BTreeSet<usize> = free_variables(phi).iter().map(|x| self.slot(x)).collect();
        let child = |i: &usize, nodes: &[Node]| (nodes[*i].first_order, nodes[*i].downward);
        let (first_order, downward) = match &kind {
            Kind::Eq(..) | Kind::NotEq(..) | Kind::Rel(..) | Kind::NotRel(..) => (true, true),
            Kind::Exc(..) | Kind::Dep(..) => (false, true),
            Kind::Inc(..) | Kind::EquiExt(..) => (false, false),
            Kind::And(a, b) | Kind::Or(a, b) => {
                let (fa, da) = child(a, &self.nodes);
                let (fb, db) = child(b, &self.nodes);
                (fa && fb, da && db)
            }
            Kind::Exists(_, b) | Kind::Forall(_, b) => child(b, &self.nodes),
            Kind::IOr(a, b) => (false, self.nodes[*a].downward && self.nodes[*b].downward),
            Kind::Store { body, .. } => (false, self.nodes[*body].downward),
            Kind::Restricted { kind, body, .. } => {
                let closed = matches!(kind, Restriction::ExistsExcl | Restriction::ForallSub | Restriction::ForallSube);
                (false, closed && self.nodes[*body].downward)
            }
            Kind::Tvp { .. } => (false, false),
        };
        self.nodes.push(Node { kind, fr: fr.into_iter().collect(), first_order, downward });
        self.nodes.len() - 1
    }

    fn compile(&mut self, phi: &Formula) -> Result<usize, EvalError> {
        if !self.native && !phi.is_core_node() {
            return Err(EvalError::NotCore);
        }
        let kind = match phi {
            Formula::Eq(a, b) => Kind::Eq(self.term(a)?, self.term(b)?),
            Formula::NotEq(a, b) => Kind::NotEq(self.term(a)?, self.term(b)?),
            Formula::Rel(r, ts) => Kind::Rel(intern(&mut self.rels, r, ts.len())?, self.terms(ts)?),
            Formula::NotRel(r, ts) => Kind::NotRel(intern(&mut self.rels, r, ts.len())?, self.terms(ts)?),
            Formula::Inc(a, b) => Kind::Inc(self.terms(a)?, self.terms(b)?),
            Formula::Exc(a, b) => Kind::Exc(self.terms(a)?, self.terms(b)?),
            Formula::EquiExt(a, b) => Kind::EquiExt(self.terms(a)?, self.terms(b)?),
            Formula::And(a, b) => Kind::And(self.compile(a)?, self.compile(b)?),
            Formula::Or(a, b) => Kind::Or(self.compile(a)?, self.compile(b)?),
            Formula::IOr(a, b) => Kind::IOr(self.compile(a)?, self.compile(b)?),
            Formula::Exists(x, b) => {
                let s = self.slot(x);
                Kind::Exists(s, self.compile(b)?)
            }
            Formula::Forall(x, b) => {
                let s = self.slot(x);
                Kind::Forall(s, self.compile(b)?)
            }
            Formula::Dep(t) => Kind::Dep(self.term(t)?),
            Formula::Store { from, to, body } => Kind::Store {
                from: self.terms(from)?,
                to: to.iter().map(|u| self.slot(u)).collect(),
                body: self.compile(body)?,
            },
            Formula::Restricted { kind, vars, bound, body } => Kind::Restricted {
                kind: *kind,
                vars: vars.iter().map(|x| self.slot(x)).collect(),
                bound: self.terms(bound)?,
                body: self.compile(body)?,
            },
            Formula::TvpOr { left, right, preserved } => Kind::Tvp {
                left: self.compile(left)?,
                right: self.compile(right)?,
                preserved: preserved.iter().map(|t| self.terms(t)).collect::<Result<_, _>>()?,
            },
            Formula::Relativized { body, var } => {
                let expanded = relativize(body, var)?;
                return self.compile(&expanded);
            }
        };
        Ok(self.push(phi, kind))
    }
}

impl Program {
    pub fn compile(phi: &Formula, domain: &[String], native: bool) -> Result<Program, EvalError> {
        let mut c = Compiler {
            nodes: Vec::new(),
            slots: Vec::new(),
            slot_of: HashMap::new(),
            rels: Vec::new(),
            funcs: Vec::new(),
            consts: Vec::new(),
            native,
        };
        for x in domain {
            c.slot(x);
        }
        if let Some(x) = free_variables(phi).into_iter().find(|x| !domain.contains(x)) {
            return Err(EvalError::UnboundVariable(x));
        }
        let root = c.compile(phi)?;
        Ok(Program {
            nodes: c.nodes,
            root,
            slots: c.slots,
            domain_len: domain.len(),
            rels: c.rels,
            funcs: c.funcs,
            consts: c.consts,
        })
    }

    pub fn width(&self) -> usize {
        self.slots.len()
    }

    /// Resolves the symbols of the program in `m`.
    pub fn bind<'m>(&self, m: &'m Model) -> Result<View<'m>, EvalError> {
        let rels = self
            .rels
            .iter()
            .map(|(name, arity)| match m.relation(name) {
                None => Err(EvalError::UnknownSymbol(name.clone())),
                Some(r) if r.arity() != *arity => Err(EvalError::Invalid(format!(
                    "relation `{name}` has arity {}, used with {arity}",
                    r.arity()
                ))),
                Some(r) => Ok(r),
            })
            .collect::<Result<_, _>>()?;
        let funcs = self
            .funcs
            .iter()
            .map(|(name, arity)| match m.function(name) {
                None => Err(EvalError::UnknownSymbol(name.clone())),
                Some(f) if f.arity() != *arity => Err(EvalError::Invalid(format!(
                    "function `{name}` has arity {}, used with {arity}",
                    f.arity()
                ))),
                Some(f) => Ok(f),
            })
            .collect::<Result<_, _>>()?;
        let consts = self
            .consts
            .iter()
            .map(|c| m.constant(c).ok_or_else(|| EvalError::UnknownSymbol(c.clone())))
            .collect::<Result<_, _>>()?;
        Ok(View { n: m.size(), rels, funcs, consts })
    }
}

/// Interpretations of the program's symbols in a particular model.
pub(crate) struct View<'m> {
    pub n: usize,
    rels: Vec<&'m Relation>,
    funcs: Vec<&'m Function>,
    consts: Vec<Elem>,
}

impl View<'_> {
    pub fn term(&self, t: &CTerm, row: &[Elem]) -> Elem {
        match t {
            CTerm::Var(s) => row[*s],
            CTerm::Const(c) => self.consts[*c],
            CTerm::App(f, args) => {
                let vals: Vec<Elem> = args.iter().map(|a| self.term(a, row)).collect();
                self.funcs[*f].table()[tuple_index(self.n, &vals)]
            }
        }
    }

    pub fn tuple(&self, ts: &[CTerm], row: &[Elem]) -> Vec<Elem> {
        ts.iter().map(|t| self.term(t, row)).collect()
    }

    pub fn holds(&self, r: usize, ts: &[CTerm], row: &[Elem]) -> bool {
        let vals: Vec<Elem> = ts.iter().map(|t| self.term(t, row)).collect();
        self.rels[r].contains(&vals)
    }

    /// Truth of a literal node on a single row.
    pub fn literal(&self, kind: &Kind, row: &[Elem]) -> Option<bool> {
        Some(match kind {
            Kind::Eq(a, b) => self.term(a, row) == self.term(b, row),
            Kind::NotEq(a, b) => self.term(a, row) != self.term(b, row),
            Kind::Rel(r, ts) => self.holds(*r, ts, row),
            Kind::NotRel(r, ts) => !self.holds(*r, ts, row),
            _ => return None,
        })
    }

    /// Tarski truth of a first-order node on one full-width row.
    pub fn tarski(&self, prog: &Program, node: usize, row: &mut [Elem]) -> bool {
        let kind = &prog.nodes[node].kind;
        if let Some(v) = self.literal(kind, row) {
            return v;
        }
        match kind {
            Kind::And(a, b) => self.tarski(prog, *a, row) && self.tarski(prog, *b, row),
            Kind::Or(a, b) => self.tarski(prog, *a, row) || self.tarski(prog, *b, row),
            Kind::Exists(x, b) | Kind::Forall(x, b) => {
                let saved = row[*x];
                let universal = matches!(kind, Kind::Forall(..));
                let mut result = universal;
                for a in 0..self.n {
                    row[*x] = a as Elem;
                    if self.tarski(prog, *b, row) != universal {
                        result = !universal;
                        break;
                    }
                }
                row[*x] = saved;
                result
            }
            _ => panic!("tarski evaluation of a non-first-order node"),
        }
    }
}

/// All `k`-tuples over `0..n` in lexicographic order.
pub(crate) fn tuples(n: usize, k: usize) -> Vec<Vec<Elem>> {
    crate::structures::all_tuples(n, k).collect()
}

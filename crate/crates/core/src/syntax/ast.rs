use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Symbols of a first-order vocabulary.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub relations: BTreeMap<String, usize>,
    pub functions: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Self {
        self.relations.insert(name.to_string(), arity);
        self
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Self {
        self.functions.insert(name.to_string(), arity);
        self
    }

    pub fn with_constant(mut self, name: &str) -> Self {
        self.constants.insert(name.to_string());
        self
    }

    /// Checks that names are disjoint across categories and arities are positive.
    pub fn validate(&self) -> Result<(), String> {
        for (name, &arity) in self.relations.iter().chain(self.functions.iter()) {
            if arity == 0 {
                return Err(format!("symbol `{name}` must have arity at least 1"));
            }
        }
        for name in self.relations.keys() {
            if self.functions.contains_key(name) || self.constants.contains(name) {
                return Err(format!("symbol `{name}` declared in more than one category"));
            }
        }
        for name in self.functions.keys() {
            if self.constants.contains(name) {
                return Err(format!("symbol `{name}` declared in more than one category"));
            }
        }
        Ok(())
    }

    pub fn is_relational(&self) -> bool {
        self.functions.is_empty() && self.constants.is_empty()
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        self.relations.contains_key(name)
            || self.functions.contains_key(name)
            || self.constants.contains(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    /// Variables occurring in the term, `vr(t)`.
    pub fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.vars_into(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.vars_into(&mut out);
        out
    }
}

pub fn vars_of_tuple(ts: &[Term]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    ts.iter().for_each(|t| t.vars_into(&mut out));
    out
}

pub fn var_tuple(names: &[String]) -> Vec<Term> {
    names.iter().map(|n| Term::Var(n.clone())).collect()
}

/// The restricted quantifiers `(∃x̄⊆t̄)`, `(∃x̄|t̄)`, `(∀x̄⊆t̄)`, `(∀x̄|t̄)` and the
/// exclusion-logic variant of the universal inclusion quantifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Restriction {
    ExistsSub,
    ExistsExcl,
    ForallSub,
    ForallExcl,
    ForallSube,
}

impl Restriction {
    pub const ALL: [Restriction; 5] = [
        Restriction::ExistsSub,
        Restriction::ExistsExcl,
        Restriction::ForallSub,
        Restriction::ForallExcl,
        Restriction::ForallSube,
    ];

    pub fn is_existential(self) -> bool {
        matches!(self, Restriction::ExistsSub | Restriction::ExistsExcl)
    }

    /// Whether the quantified values range over the complement of `X(t̄)`.
    pub fn is_complement(self) -> bool {
        matches!(self, Restriction::ExistsExcl | Restriction::ForallExcl)
    }

    pub fn keyword(self) -> (&'static str, &'static str) {
        match self {
            Restriction::ExistsSub => ("exists", "sub"),
            Restriction::ExistsExcl => ("exists", "excl"),
            Restriction::ForallSub => ("forall", "sub"),
            Restriction::ForallExcl => ("forall", "excl"),
            Restriction::ForallSube => ("forall", "sube"),
        }
    }
}

/// Team-logic formulas in negation normal form.
///
/// The first eleven variants form the core language; the rest are derived
/// operators that [`crate::syntax::desugar`] rewrites into the core.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    NotEq(Term, Term),
    Rel(String, Vec<Term>),
    NotRel(String, Vec<Term>),
    Inc(Vec<Term>, Vec<Term>),
    Exc(Vec<Term>, Vec<Term>),
    EquiExt(Vec<Term>, Vec<Term>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    Dep(Term),
    IOr(Box<Formula>, Box<Formula>),
    Store {
        from: Vec<Term>,
        to: Vec<String>,
        body: Box<Formula>,
    },
    Restricted {
        kind: Restriction,
        vars: Vec<String>,
        bound: Vec<Term>,
        body: Box<Formula>,
    },
    TvpOr {
        left: Box<Formula>,
        right: Box<Formula>,
        preserved: Vec<Vec<Term>>,
    },
    Relativized {
        body: Box<Formula>,
        var: String,
    },
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn ior(a: Formula, b: Formula) -> Formula {
        Formula::IOr(Box::new(a), Box::new(b))
    }

    pub fn exists(x: &str, body: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(body))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(x.to_string(), Box::new(body))
    }

    pub fn exists_all(xs: &[String], body: Formula) -> Formula {
        xs.iter()
            .rev()
            .fold(body, |acc, x| Formula::Exists(x.clone(), Box::new(acc)))
    }

    pub fn forall_all(xs: &[String], body: Formula) -> Formula {
        xs.iter()
            .rev()
            .fold(body, |acc, x| Formula::Forall(x.clone(), Box::new(acc)))
    }

    pub fn restricted(kind: Restriction, vars: Vec<String>, bound: Vec<Term>, body: Formula) -> Formula {
        Formula::Restricted { kind, vars, bound, body: Box::new(body) }
    }

    pub fn tvp(left: Formula, right: Formula, preserved: Vec<Vec<Term>>) -> Formula {
        Formula::TvpOr { left: Box::new(left), right: Box::new(right), preserved }
    }

    /// `t̄₁ = t̄₂` as a conjunction of equalities (`⊤` encoded as `x = x` is never
    /// needed: callers pass nonempty tuples).
    pub fn tuple_eq(a: &[Term], b: &[Term]) -> Formula {
        conj(a.iter().zip(b).map(|(s, t)| Formula::Eq(s.clone(), t.clone())).collect())
    }

    /// `t̄₁ ≠ t̄₂` as a disjunction of inequalities.
    pub fn tuple_neq(a: &[Term], b: &[Term]) -> Formula {
        disj(a.iter().zip(b).map(|(s, t)| Formula::NotEq(s.clone(), t.clone())).collect())
    }

    /// True for the core connectives, literals and atoms.
    pub fn is_core_node(&self) -> bool {
        matches!(
            self,
            Formula::Eq(..)
                | Formula::NotEq(..)
                | Formula::Rel(..)
                | Formula::NotRel(..)
                | Formula::Inc(..)
                | Formula::Exc(..)
                | Formula::And(..)
                | Formula::Or(..)
                | Formula::Exists(..)
                | Formula::Forall(..)
        )
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Formula::Eq(..) | Formula::NotEq(..) | Formula::Rel(..) | Formula::NotRel(..))
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::And(a, b) | Formula::Or(a, b) | Formula::IOr(a, b) => vec![a, b],
            Formula::TvpOr { left, right, .. } => vec![left, right],
            Formula::Exists(_, b) | Formula::Forall(_, b) => vec![b],
            Formula::Store { body, .. }
            | Formula::Restricted { body, .. }
            | Formula::Relativized { body, .. } => vec![body],
            _ => vec![],
        }
    }

    /// Whether every node of the formula is a core node.
    pub fn is_core(&self) -> bool {
        self.is_core_node() && self.children().into_iter().all(Formula::is_core)
    }

    /// First-order: literals, `∧`, `∨`, `∃`, `∀` only.
    pub fn is_first_order(&self) -> bool {
        match self {
            Formula::Eq(..) | Formula::NotEq(..) | Formula::Rel(..) | Formula::NotRel(..) => true,
            Formula::And(a, b) | Formula::Or(a, b) => a.is_first_order() && b.is_first_order(),
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.is_first_order(),
            _ => false,
        }
    }

    /// Number of nodes, used to keep generated formulas small.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Every variable name occurring anywhere (free, bound, or in tuples), `vr(φ)`.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) | Formula::NotEq(a, b) => {
                a.vars_into(out);
                b.vars_into(out);
            }
            Formula::Rel(_, ts) | Formula::NotRel(_, ts) => ts.iter().for_each(|t| t.vars_into(out)),
            Formula::Inc(a, b) | Formula::Exc(a, b) | Formula::EquiExt(a, b) => {
                a.iter().chain(b).for_each(|t| t.vars_into(out))
            }
            Formula::Dep(t) => t.vars_into(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::IOr(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Exists(x, b) | Formula::Forall(x, b) => {
                out.insert(x.clone());
                b.collect_vars(out);
            }
            Formula::Store { from, to, body } => {
                from.iter().for_each(|t| t.vars_into(out));
                out.extend(to.iter().cloned());
                body.collect_vars(out);
            }
            Formula::Restricted { vars, bound, body, .. } => {
                out.extend(vars.iter().cloned());
                bound.iter().for_each(|t| t.vars_into(out));
                body.collect_vars(out);
            }
            Formula::TvpOr { left, right, preserved } => {
                left.collect_vars(out);
                right.collect_vars(out);
                preserved.iter().flatten().for_each(|t| t.vars_into(out));
            }
            Formula::Relativized { body, var } => {
                out.insert(var.clone());
                body.collect_vars(out);
            }
        }
    }

    /// Relation symbols used, with the arities at which they occur.
    pub fn relation_symbols(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Rel(r, ts) | Formula::NotRel(r, ts) = f {
                out.insert((r.clone(), ts.len()));
            }
        });
        out
    }

    /// Function and constant symbols used in terms.
    pub fn term_symbols(&self) -> BTreeSet<String> {
        fn term(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::Var(_) => {}
                Term::Const(c) => {
                    out.insert(c.clone());
                }
                Term::App(f, args) => {
                    out.insert(f.clone());
                    args.iter().for_each(|a| term(a, out));
                }
            }
        }
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            let mut ts: Vec<&Term> = Vec::new();
            match f {
                Formula::Eq(a, b) | Formula::NotEq(a, b) => ts.extend([a, b]),
                Formula::Rel(_, xs) | Formula::NotRel(_, xs) => ts.extend(xs),
                Formula::Inc(a, b) | Formula::Exc(a, b) | Formula::EquiExt(a, b) => {
                    ts.extend(a.iter().chain(b))
                }
                Formula::Dep(t) => ts.push(t),
                Formula::Store { from, .. } => ts.extend(from),
                Formula::Restricted { bound, .. } => ts.extend(bound),
                Formula::TvpOr { preserved, .. } => ts.extend(preserved.iter().flatten()),
                _ => {}
            }
            ts.into_iter().for_each(|t| term(t, &mut out));
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }
}

/// Left-nested conjunction; an empty list yields `None`.
pub fn try_conj(mut parts: Vec<Formula>) -> Option<Formula> {
    if parts.is_empty() {
        return None;
    }
    let first = parts.remove(0);
    Some(parts.into_iter().fold(first, Formula::and))
}

pub fn conj(parts: Vec<Formula>) -> Formula {
    try_conj(parts).expect("conjunction of an empty list")
}

pub fn disj(mut parts: Vec<Formula>) -> Formula {
    assert!(!parts.is_empty(), "disjunction of an empty list");
    let first = parts.remove(0);
    parts.into_iter().fold(first, Formula::or)
}

/// An existential second-order formula `∃P₁…∃Pₙ γ` in prenex form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EsoFormula {
    pub quantified: Vec<(String, usize)>,
    pub matrix: Formula,
    pub free_relvars: BTreeSet<(String, usize)>,
}

impl EsoFormula {
    /// Builds an ESO formula, classifying every relation symbol of the matrix
    /// that is neither quantified nor in `vocab` as a free relation variable.
    pub fn new(quantified: Vec<(String, usize)>, matrix: Formula, vocab: &Vocabulary) -> Result<Self, String> {
        let mut free = BTreeSet::new();
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        for (name, arity) in &quantified {
            if vocab.contains_symbol(name) {
                return Err(format!("relation variable `{name}` clashes with a vocabulary symbol"));
            }
            if seen.insert(name.clone(), *arity).is_some() {
                return Err(format!("relation variable `{name}` quantified twice"));
            }
        }
        if !matrix.is_first_order() {
            return Err("ESO matrix must be first-order".to_string());
        }
        for (name, arity) in matrix.relation_symbols() {
            if let Some(&declared) = vocab.relations.get(&name) {
                if declared != arity {
                    return Err(format!("relation `{name}` has arity {declared}, used with {arity}"));
                }
                continue;
            }
            match seen.get(&name) {
                Some(&declared) if declared != arity => {
                    return Err(format!(
                        "relation variable `{name}` declared with arity {declared}, used with {arity}"
                    ))
                }
                Some(_) => {}
                None => {
                    seen.insert(name.clone(), arity);
                    free.insert((name, arity));
                }
            }
        }
        Ok(EsoFormula { quantified, matrix, free_relvars: free })
    }

    pub fn max_arity(&self) -> usize {
        self.quantified
            .iter()
            .chain(self.free_relvars.iter())
            .map(|(_, a)| *a)
            .max()
            .unwrap_or(0)
    }
}

/// Fragment of a formula by the kinds of dependency atoms it contains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fragment {
    FirstOrder,
    Inc(usize),
    Exc(usize),
    Inex(usize),
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fragment::FirstOrder => write!(f, "FO"),
            Fragment::Inc(k) => write!(f, "INC[{k}]"),
            Fragment::Exc(k) => write!(f, "EXC[{k}]"),
            Fragment::Inex(k) => write!(f, "INEX[{k}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArityProfile {
    pub max_inc: usize,
    pub max_exc: usize,
    pub has_inc: bool,
    pub has_exc: bool,
}

impl ArityProfile {
    pub fn fragment(&self) -> Fragment {
        let k = self.max_inc.max(self.max_exc);
        match (self.has_inc, self.has_exc) {
            (false, false) => Fragment::FirstOrder,
            (true, false) => Fragment::Inc(k),
            (false, true) => Fragment::Exc(k),
            (true, true) => Fragment::Inex(k),
        }
    }

    pub fn max_arity(&self) -> usize {
        self.max_inc.max(self.max_exc)
    }
}

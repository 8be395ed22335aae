//! Finite models, assignments and teams, together with the team operations
//! used by the semantics: `X(t̄)`, `X[A/x̄]`, `X[F/x̄]`, `X↾V` and `M[Ā/P̄]`.

mod json;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::syntax::{Term, Vocabulary};

pub use json::{model_from_json, model_to_json, team_from_json, team_to_json};

/// Universe elements. Universes are `0..size`.
pub type Elem = u8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("arity mismatch for `{name}`: expected {expected}, got {got}")]
    ArityMismatch { name: String, expected: usize, got: usize },
    #[error("element {0} outside the universe")]
    OutOfUniverse(usize),
    #[error("empty choice set for a team member")]
    EmptyChoice,
    #[error("variable `{0}` not in the team domain")]
    NotInDomain(String),
    #[error("invalid structure: {0}")]
    Invalid(String),
}

/// A relation stored as a bitmap over the `size^arity` tuple slots in
/// row-major order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    arity: usize,
    size: usize,
    bits: Vec<bool>,
}

/// Row-major index of a tuple over a universe of the given size.
pub fn tuple_index(size: usize, tuple: &[Elem]) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * size + a as usize)
}

/// Inverse of [`tuple_index`].
pub fn index_tuple(size: usize, arity: usize, mut index: usize) -> Vec<Elem> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = (index % size) as Elem;
        index /= size;
    }
    out
}

/// All tuples of the given arity in lexicographic order.
pub fn all_tuples(size: usize, arity: usize) -> impl Iterator<Item = Vec<Elem>> {
    let count = size.pow(arity as u32);
    (0..count).map(move |i| index_tuple(size, arity, i))
}

impl Relation {
    pub fn empty(size: usize, arity: usize) -> Self {
        Relation { arity, size, bits: vec![false; size.pow(arity as u32)] }
    }

    pub fn full(size: usize, arity: usize) -> Self {
        Relation { arity, size, bits: vec![true; size.pow(arity as u32)] }
    }

    pub fn from_tuples<I, T>(size: usize, arity: usize, tuples: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[Elem]>,
    {
        let mut rel = Relation::empty(size, arity);
        for t in tuples {
            let t = t.as_ref();
            if t.len() != arity {
                return Err(StructureError::Invalid(format!(
                    "tuple of length {} in a relation of arity {arity}",
                    t.len()
                )));
            }
            if let Some(&a) = t.iter().find(|&&a| a as usize >= size) {
                return Err(StructureError::OutOfUniverse(a as usize));
            }
            rel.bits[tuple_index(size, t)] = true;
        }
        Ok(rel)
    }

    /// Builds a relation from a slot bitmap, bit `i` standing for the `i`-th
    /// tuple in row-major order.
    pub fn from_bits(size: usize, arity: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), size.pow(arity as u32));
        Relation { arity, size, bits }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn contains(&self, tuple: &[Elem]) -> bool {
        self.bits[tuple_index(self.size, tuple)]
    }

    pub fn contains_index(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn tuples(&self) -> impl Iterator<Item = Vec<Elem>> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| index_tuple(self.size, self.arity, i))
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// A total function stored as a row-major value table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Function {
    arity: usize,
    table: Vec<Elem>,
}

impl Function {
    pub fn new(size: usize, arity: usize, table: Vec<Elem>) -> Result<Self, StructureError> {
        if table.len() != size.pow(arity as u32) {
            return Err(StructureError::Invalid(format!(
                "function table of length {} for arity {arity} over {size} elements",
                table.len()
            )));
        }
        if let Some(&a) = table.iter().find(|&&a| a as usize >= size) {
            return Err(StructureError::OutOfUniverse(a as usize));
        }
        Ok(Function { arity, table })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }
}

/// A finite model over the universe `{0, …, size−1}`. Relation variables
/// bound for ESO evaluation live beside the vocabulary relations and shadow
/// them on lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    size: usize,
    relations: BTreeMap<String, Relation>,
    functions: BTreeMap<String, Function>,
    constants: BTreeMap<String, Elem>,
    relvars: BTreeMap<String, Relation>,
}

impl Model {
    pub fn new(size: usize) -> Result<Self, StructureError> {
        if size == 0 {
            return Err(StructureError::Invalid("the universe must be nonempty".into()));
        }
        if size > Elem::MAX as usize + 1 {
            return Err(StructureError::Invalid(format!("universe of size {size} is too large")));
        }
        Ok(Model {
            size,
            relations: BTreeMap::new(),
            functions: BTreeMap::new(),
            constants: BTreeMap::new(),
            relvars: BTreeMap::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn universe(&self) -> impl Iterator<Item = Elem> {
        (0..self.size).map(|a| a as Elem)
    }

    pub fn set_relation(&mut self, name: &str, rel: Relation) -> Result<(), StructureError> {
        self.check_fresh(name, "relation")?;
        self.check_rel_size(&rel)?;
        self.relations.insert(name.to_string(), rel);
        Ok(())
    }

    pub fn with_relation<I, T>(mut self, name: &str, arity: usize, tuples: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[Elem]>,
    {
        let rel = Relation::from_tuples(self.size, arity, tuples)?;
        self.set_relation(name, rel)?;
        Ok(self)
    }

    pub fn set_function(&mut self, name: &str, arity: usize, table: Vec<Elem>) -> Result<(), StructureError> {
        self.check_fresh(name, "function")?;
        if arity == 0 {
            return Err(StructureError::Invalid(format!("function `{name}` must have arity at least 1")));
        }
        self.functions.insert(name.to_string(), Function::new(self.size, arity, table)?);
        Ok(())
    }

    pub fn set_constant(&mut self, name: &str, value: Elem) -> Result<(), StructureError> {
        self.check_fresh(name, "constant")?;
        if value as usize >= self.size {
            return Err(StructureError::OutOfUniverse(value as usize));
        }
        self.constants.insert(name.to_string(), value);
        Ok(())
    }

    fn check_fresh(&self, name: &str, kind: &str) -> Result<(), StructureError> {
        let taken = match kind {
            "relation" => self.functions.contains_key(name) || self.constants.contains_key(name),
            "function" => self.relations.contains_key(name) || self.constants.contains_key(name),
            _ => self.relations.contains_key(name) || self.functions.contains_key(name),
        };
        if taken {
            return Err(StructureError::Invalid(format!("symbol `{name}` interpreted twice")));
        }
        Ok(())
    }

    fn check_rel_size(&self, rel: &Relation) -> Result<(), StructureError> {
        if rel.size != self.size {
            return Err(StructureError::Invalid("relation built over a different universe".into()));
        }
        Ok(())
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    pub fn functions(&self) -> &BTreeMap<String, Function> {
        &self.functions
    }

    pub fn constants(&self) -> &BTreeMap<String, Elem> {
        &self.constants
    }

    pub fn relvars(&self) -> &BTreeMap<String, Relation> {
        &self.relvars
    }

    /// Interpretation of a relation symbol or bound relation variable.
    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relvars.get(name).or_else(|| self.relations.get(name))
    }

    pub fn function(&self, name: &str) -> Option<&Function> {
        self.functions.get(name)
    }

    pub fn constant(&self, name: &str) -> Option<Elem> {
        self.constants.get(name).copied()
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary {
            relations: self.relations.iter().map(|(n, r)| (n.clone(), r.arity)).collect(),
            functions: self.functions.iter().map(|(n, f)| (n.clone(), f.arity)).collect(),
            constants: self.constants.keys().cloned().collect(),
        }
    }

    /// Checks that every symbol of `vocab` is interpreted with the right arity.
    pub fn check_vocabulary(&self, vocab: &Vocabulary) -> Result<(), StructureError> {
        for (name, &arity) in &vocab.relations {
            match self.relations.get(name) {
                None => return Err(StructureError::UnknownSymbol(name.clone())),
                Some(r) if r.arity != arity => {
                    return Err(StructureError::ArityMismatch { name: name.clone(), expected: arity, got: r.arity })
                }
                _ => {}
            }
        }
        for (name, &arity) in &vocab.functions {
            match self.functions.get(name) {
                None => return Err(StructureError::UnknownSymbol(name.clone())),
                Some(f) if f.arity != arity => {
                    return Err(StructureError::ArityMismatch { name: name.clone(), expected: arity, got: f.arity })
                }
                _ => {}
            }
        }
        for name in &vocab.constants {
            if !self.constants.contains_key(name) {
                return Err(StructureError::UnknownSymbol(name.clone()));
            }
        }
        Ok(())
    }

    /// `M[A₁/P₁,…,Aₙ/Pₙ]`: a copy of the model with the given relation
    /// variables (re)bound.
    pub fn bind_relvars(&self, bindings: &BTreeMap<String, Relation>) -> Result<Model, StructureError> {
        let mut out = self.clone();
        for (name, rel) in bindings {
            self.check_rel_size(rel)?;
            if self.functions.contains_key(name) || self.constants.contains_key(name) {
                return Err(StructureError::Invalid(format!("relation variable `{name}` names a term symbol")));
            }
            if let Some(prev) = self.relation(name) {
                if prev.arity != rel.arity {
                    return Err(StructureError::ArityMismatch {
                        name: name.clone(),
                        expected: prev.arity,
                        got: rel.arity,
                    });
                }
            }
            out.relvars.insert(name.clone(), rel.clone());
        }
        Ok(out)
    }

    /// `M↾A` for a relational model and a nonempty `A ⊆ M`; the elements of
    /// `A` are renumbered in increasing order.
    pub fn submodel(&self, subset: &BTreeSet<Elem>) -> Result<Model, StructureError> {
        if !self.functions.is_empty() || !self.constants.is_empty() {
            return Err(StructureError::Invalid("submodels need a relational vocabulary".into()));
        }
        if let Some(&a) = subset.iter().find(|&&a| a as usize >= self.size) {
            return Err(StructureError::OutOfUniverse(a as usize));
        }
        let elems: Vec<Elem> = subset.iter().copied().collect();
        let mut out = Model::new(elems.len())?;
        for (name, rel) in &self.relations {
            let sub = all_tuples(elems.len(), rel.arity)
                .filter(|t| rel.contains(&t.iter().map(|&i| elems[i as usize]).collect::<Vec<_>>()));
            out.set_relation(name, Relation::from_tuples(elems.len(), rel.arity, sub)?)?;
        }
        Ok(out)
    }
}

/// A single assignment `s`, a finite map from variables to elements.
pub type Assignment = BTreeMap<String, Elem>;

/// Interprets `t` under `s`.
pub fn eval_term(m: &Model, s: &Assignment, t: &Term) -> Result<Elem, StructureError> {
    match t {
        Term::Var(x) => s.get(x).copied().ok_or_else(|| StructureError::UnboundVariable(x.clone())),
        Term::Const(c) => m.constant(c).ok_or_else(|| StructureError::UnknownSymbol(c.clone())),
        Term::App(f, args) => {
            let fun = m.function(f).ok_or_else(|| StructureError::UnknownSymbol(f.clone()))?;
            if fun.arity != args.len() {
                return Err(StructureError::ArityMismatch { name: f.clone(), expected: fun.arity, got: args.len() });
            }
            let vals = args.iter().map(|a| eval_term(m, s, a)).collect::<Result<Vec<_>, _>>()?;
            Ok(fun.table[tuple_index(m.size, &vals)])
        }
    }
}

/// A team: a set of assignments with a common, explicitly stored domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Team {
    domain: Vec<String>,
    rows: BTreeSet<Vec<Elem>>,
}

impl Team {
    pub fn new(domain: Vec<String>) -> Result<Self, StructureError> {
        let distinct: BTreeSet<&String> = domain.iter().collect();
        if distinct.len() != domain.len() {
            return Err(StructureError::Invalid("repeated variable in a team domain".into()));
        }
        Ok(Team { domain, rows: BTreeSet::new() })
    }

    pub fn from_rows<I>(domain: Vec<String>, rows: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = Vec<Elem>>,
    {
        let mut team = Team::new(domain)?;
        for row in rows {
            team.insert(row)?;
        }
        Ok(team)
    }

    /// `{∅}`, the team holding only the empty assignment.
    pub fn unit() -> Self {
        Team { domain: Vec::new(), rows: BTreeSet::from([Vec::new()]) }
    }

    pub fn singleton(s: &Assignment) -> Self {
        Team { domain: s.keys().cloned().collect(), rows: BTreeSet::from([s.values().copied().collect()]) }
    }

    pub fn insert(&mut self, row: Vec<Elem>) -> Result<bool, StructureError> {
        if row.len() != self.domain.len() {
            return Err(StructureError::Invalid(format!(
                "row of length {} in a team over {} variables",
                row.len(),
                self.domain.len()
            )));
        }
        Ok(self.rows.insert(row))
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn rows(&self) -> &BTreeSet<Vec<Elem>> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn position(&self, x: &str) -> Option<usize> {
        self.domain.iter().position(|v| v == x)
    }

    /// Checks that every row lies within the universe of `m`.
    pub fn check_universe(&self, m: &Model) -> Result<(), StructureError> {
        for row in &self.rows {
            if let Some(&a) = row.iter().find(|&&a| a as usize >= m.size()) {
                return Err(StructureError::OutOfUniverse(a as usize));
            }
        }
        Ok(())
    }

    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.rows.iter().map(|row| self.domain.iter().cloned().zip(row.iter().copied()).collect())
    }

    pub fn union(&self, other: &Team) -> Result<Team, StructureError> {
        let other = other.reorder(&self.domain)?;
        Ok(Team { domain: self.domain.clone(), rows: self.rows.union(&other.rows).cloned().collect() })
    }

    /// The same team presented over a permutation of its domain.
    pub fn reorder(&self, domain: &[String]) -> Result<Team, StructureError> {
        if domain.len() != self.domain.len() {
            return Err(StructureError::Invalid("domains differ".into()));
        }
        let idx = domain
            .iter()
            .map(|x| self.position(x).ok_or_else(|| StructureError::NotInDomain(x.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Team {
            domain: domain.to_vec(),
            rows: self.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect(),
        })
    }

    /// All subteams, as bitmasks over the rows in order.
    pub fn subteams(&self) -> impl Iterator<Item = Team> + '_ {
        let rows: Vec<&Vec<Elem>> = self.rows.iter().collect();
        assert!(rows.len() < 32, "too many rows to enumerate subteams");
        (0u32..1 << rows.len()).map(move |mask| Team {
            domain: self.domain.clone(),
            rows: rows.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, r)| (*r).clone()).collect(),
        })
    }
}

/// `X(t̄)`.
pub fn team_values(m: &Model, x: &Team, ts: &[Term]) -> Result<BTreeSet<Vec<Elem>>, StructureError> {
    x.assignments().map(|s| ts.iter().map(|t| eval_term(m, &s, t)).collect()).collect()
}

fn extended_domain(x: &Team, vars: &[String]) -> Result<(Vec<String>, Vec<usize>), StructureError> {
    let distinct: BTreeSet<&String> = vars.iter().collect();
    if distinct.len() != vars.len() {
        return Err(StructureError::Invalid("repeated variable in an extension".into()));
    }
    let mut domain = x.domain.clone();
    let slots = vars
        .iter()
        .map(|v| match x.position(v) {
            Some(i) => i,
            None => {
                domain.push(v.clone());
                domain.len() - 1
            }
        })
        .collect();
    Ok((domain, slots))
}

fn overwrite(row: &[Elem], width: usize, slots: &[usize], values: &[Elem]) -> Vec<Elem> {
    let mut out = row.to_vec();
    out.resize(width, 0);
    for (&i, &a) in slots.iter().zip(values) {
        out[i] = a;
    }
    out
}

/// `X[A/x̄]`. The domain is extended by `x̄` even when `A` is empty.
pub fn extend_with_set(x: &Team, values: &BTreeSet<Vec<Elem>>, vars: &[String]) -> Result<Team, StructureError> {
    if let Some(t) = values.iter().find(|t| t.len() != vars.len()) {
        return Err(StructureError::ArityMismatch { name: "x̄".into(), expected: vars.len(), got: t.len() });
    }
    let (domain, slots) = extended_domain(x, vars)?;
    let width = domain.len();
    let rows = x
        .rows
        .iter()
        .flat_map(|r| values.iter().map(|a| overwrite(r, width, &slots, a)).collect::<Vec<_>>())
        .collect();
    Ok(Team { domain, rows })
}

/// `X[F/x̄]` for a choice function `F` giving every assignment a nonempty set
/// of tuples.
pub fn extend_with_choice<F>(x: &Team, vars: &[String], mut choice: F) -> Result<Team, StructureError>
where
    F: FnMut(&Assignment) -> BTreeSet<Vec<Elem>>,
{
    let (domain, slots) = extended_domain(x, vars)?;
    let width = domain.len();
    let mut rows = BTreeSet::new();
    for (row, s) in x.rows.iter().zip(x.assignments()) {
        let chosen = choice(&s);
        if chosen.is_empty() {
            return Err(StructureError::EmptyChoice);
        }
        for a in chosen {
            if a.len() != vars.len() {
                return Err(StructureError::ArityMismatch { name: "x̄".into(), expected: vars.len(), got: a.len() });
            }
            rows.insert(overwrite(row, width, &slots, &a));
        }
    }
    Ok(Team { domain, rows })
}

/// `X↾V`. The result keeps the order of `X`'s domain.
pub fn restrict(x: &Team, vars: &BTreeSet<String>) -> Result<Team, StructureError> {
    if let Some(v) = vars.iter().find(|v| x.position(v).is_none()) {
        return Err(StructureError::NotInDomain(v.clone()));
    }
    let keep: Vec<usize> = (0..x.domain.len()).filter(|&i| vars.contains(&x.domain[i])).collect();
    Ok(Team {
        domain: keep.iter().map(|&i| x.domain[i].clone()).collect(),
        rows: x.rows.iter().map(|r| keep.iter().map(|&i| r[i]).collect()).collect(),
    })
}

/// `M[X(ȳ)/R]` for each pair of relation name and tuple.
pub fn bind_team_relations(m: &Model, x: &Team, bindings: &[(String, Vec<Term>)]) -> Result<Model, StructureError> {
    let mut rels = BTreeMap::new();
    for (name, ts) in bindings {
        let values = team_values(m, x, ts)?;
        rels.insert(name.clone(), Relation::from_tuples(m.size(), ts.len(), values)?);
    }
    m.bind_relvars(&rels)
}

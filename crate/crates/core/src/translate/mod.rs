//! Compositional translations between inclusion-exclusion logic and
//! existential second-order logic.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{
    conj, desugar, free_variables, pad_atoms_to_arity, var_tuple, EsoFormula, Formula, SyntaxError, Term, Vocabulary,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TranslateError {
    #[error("formula outside the fragment: {0}")]
    Fragment(String),
    #[error("arity {arity} exceeds k = {k}")]
    ArityExceeds { arity: usize, k: usize },
    #[error("name clash: {0}")]
    Clash(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// Single-clause corruptions of the translations, used to check that the
/// equivalence tests can tell a broken translation from a correct one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// Exclusion atoms become `Pᵢt̄₁` instead of `Pᵢt̄₁ ∧ ¬Pᵢt̄₂`.
    ExcDropNegated,
    /// The own-atom clause of `φᵢ′` loses its `ū = t̄₂` conjunct.
    IncDropBinding,
    /// The witness clause becomes `∃ȳ φᵢ′` without the `Rȳ` guard.
    IncDropRowGuard,
    /// The main guard becomes `∀ȳ(Rȳ ∧ φ′)`.
    GuardDropNegR,
    /// The universal clause of `φᵢ′` becomes `∃x ψᵢ′`, dropping `∀x ψ′`.
    IncForallWeakened,
}

impl Mutation {
    pub const ALL: [Mutation; 5] = [
        Mutation::ExcDropNegated,
        Mutation::IncDropBinding,
        Mutation::IncDropRowGuard,
        Mutation::GuardDropNegR,
        Mutation::IncForallWeakened,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::ExcDropNegated => "exc-drop-negated",
            Mutation::IncDropBinding => "inc-drop-binding",
            Mutation::IncDropRowGuard => "inc-drop-row-guard",
            Mutation::GuardDropNegR => "guard-drop-neg-r",
            Mutation::IncForallWeakened => "inc-forall-weakened",
        }
    }
}

/// Parameters shared by the translations.
#[derive(Clone, Debug)]
pub struct TranslationContext {
    /// Arity bound of the dependency atoms and relation variables.
    pub k: usize,
    /// Vocabulary of the formula; relation variables must avoid its symbols.
    pub vocab: Vocabulary,
    /// For the translations into ESO: the tuple `ȳ` whose image is `R`.
    /// `None` uses the free variables of the formula in sorted order.
    pub free: Option<Vec<String>>,
    /// Name of the relation variable holding `X(ȳ)`.
    pub relvar: String,
    /// For the translation into INEX: the variables `ȳᵢ` for each free
    /// relation variable, in the order of the relation's arguments. Unlisted
    /// relation variables get generated names.
    pub bindings: Vec<(String, Vec<String>)>,
    pub mutation: Option<Mutation>,
}

impl TranslationContext {
    pub fn new(k: usize, vocab: Vocabulary) -> Self {
        TranslationContext { k, vocab, free: None, relvar: "R".into(), bindings: Vec::new(), mutation: None }
    }

    pub fn with_free(mut self, free: &[&str]) -> Self {
        self.free = Some(free.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn with_mutation(mut self, m: Option<Mutation>) -> Self {
        self.mutation = m;
        self
    }

    pub fn with_binding(mut self, relvar: &str, vars: &[&str]) -> Self {
        self.bindings.push((relvar.to_string(), vars.iter().map(|s| s.to_string()).collect()));
        self
    }

    fn mutated(&self, m: Mutation) -> bool {
        self.mutation == Some(m)
    }
}

/// A name derived from `base` that avoids `taken`; the name is then taken.
fn fresh_name(base: &str, taken: &mut BTreeSet<String>) -> String {
    let mut name = base.to_string();
    let mut i = 1;
    while taken.contains(&name) {
        name = format!("{base}_{i}");
        i += 1;
    }
    taken.insert(name.clone());
    name
}

fn fresh_tuple(base: &str, k: usize, taken: &mut BTreeSet<String>) -> Vec<String> {
    if k == 1 {
        vec![fresh_name(base, taken)]
    } else {
        (1..=k).map(|j| fresh_name(&format!("{base}{j}"), taken)).collect()
    }
}

/// The tuple `ȳ` whose image a translation into ESO binds to the free
/// relation variable.
pub fn free_tuple(phi: &Formula, ctx: &TranslationContext) -> Vec<String> {
    match &ctx.free {
        Some(ys) => ys.clone(),
        None => free_variables(phi).into_iter().collect(),
    }
}

/// The tuple `ȳ` of a translation into ESO and the formula prepared for it:
/// derived operators removed and atoms padded to arity `k`.
fn prepare(phi: &Formula, ctx: &TranslationContext) -> Result<(Formula, Vec<String>), TranslateError> {
    let core = desugar(phi)?;
    let padded = pad_atoms_to_arity(&core, ctx.k).map_err(|e| match e {
        SyntaxError::ArityExceeds { arity, k } => TranslateError::ArityExceeds { arity, k },
        other => other.into(),
    })?;
    let fr = free_variables(phi);
    let ys = free_tuple(phi, ctx);
    let set: BTreeSet<&String> = ys.iter().collect();
    if set.len() != ys.len() {
        return Err(TranslateError::Clash("repeated variable in the free tuple".into()));
    }
    if let Some(x) = fr.iter().find(|x| !set.contains(x)) {
        return Err(TranslateError::Fragment(format!("free variable `{x}` not in the free tuple")));
    }
    if ctx.vocab.contains_symbol(&ctx.relvar) {
        return Err(TranslateError::Clash(format!("relation variable `{}` is a vocabulary symbol", ctx.relvar)));
    }
    Ok((padded, ys))
}

/// Names `P1, P2, …` for the dependency atom occurrences, avoiding the
/// vocabulary, the free relation variable and relation symbols in use.
fn relvar_names(count: usize, phi: &Formula, ctx: &TranslationContext) -> Vec<String> {
    let used: BTreeSet<String> = phi.relation_symbols().into_iter().map(|(r, _)| r).collect();
    let clashes = |name: &String| ctx.vocab.contains_symbol(name) || *name == ctx.relvar || used.contains(name);
    for prefix in ["P", "Q", "S", "T"] {
        let names: Vec<String> = (1..=count).map(|i| format!("{prefix}{i}")).collect();
        if !names.iter().any(clashes) {
            return names;
        }
    }
    let mut i = 0;
    (1..=count)
        .map(|j| loop {
            i += 1;
            let name = format!("P{j}_{i}");
            if !clashes(&name) {
                break name;
            }
        })
        .collect()
}

/// Number of inclusion and exclusion atom occurrences.
fn atom_occurrences(phi: &Formula) -> usize {
    let mut n = 0;
    phi.walk(&mut |f| {
        if matches!(f, Formula::Inc(..) | Formula::Exc(..)) {
            n += 1;
        }
    });
    n
}

fn rel(name: &str, ts: &[Term]) -> Formula {
    Formula::Rel(name.to_string(), ts.to_vec())
}

fn not_rel(name: &str, ts: &[Term]) -> Formula {
    Formula::NotRel(name.to_string(), ts.to_vec())
}

/// Replaces every exclusion atom by `Pᵢt̄₁ ∧ ¬Pᵢt̄₂`, numbering all atom
/// occurrences in preorder. The indices used are pushed to `used`.
fn replace_exclusions(
    phi: &Formula,
    names: &[String],
    counter: &mut usize,
    used: &mut Vec<usize>,
    ctx: &TranslationContext,
) -> Formula {
    let rec = |f: &Formula, counter: &mut usize, used: &mut Vec<usize>| {
        Box::new(replace_exclusions(f, names, counter, used, ctx))
    };
    match phi {
        Formula::Exc(a, b) => {
            let i = *counter;
            *counter += 1;
            used.push(i);
            if ctx.mutated(Mutation::ExcDropNegated) {
                rel(&names[i], a)
            } else {
                Formula::and(rel(&names[i], a), not_rel(&names[i], b))
            }
        }
        Formula::Inc(..) => {
            *counter += 1;
            phi.clone()
        }
        Formula::And(a, b) => {
            let a = rec(a, counter, used);
            Formula::And(a, rec(b, counter, used))
        }
        Formula::Or(a, b) => {
            let a = rec(a, counter, used);
            Formula::Or(a, rec(b, counter, used))
        }
        Formula::Exists(x, b) => Formula::Exists(x.clone(), rec(b, counter, used)),
        Formula::Forall(x, b) => Formula::Forall(x.clone(), rec(b, counter, used)),
        _ => phi.clone(),
    }
}

/// An inclusion atom occurrence after numbering.
struct IncAtom {
    index: usize,
}

/// `φ′` of the inclusion translation: inclusion occurrence `i` becomes
/// `Pᵢt̄₁`. Occurrences are numbered in preorder, counting exclusion atoms
/// already replaced by literals as well.
fn inc_prime(phi: &Formula, names: &[String], order: &mut std::vec::IntoIter<usize>) -> Formula {
    match phi {
        Formula::Inc(a, _) => rel(&names[order.next().expect("numbered occurrence")], a),
        Formula::And(a, b) => {
            let a = inc_prime(a, names, order);
            Formula::and(a, inc_prime(b, names, order))
        }
        Formula::Or(a, b) => {
            let a = inc_prime(a, names, order);
            Formula::or(a, inc_prime(b, names, order))
        }
        Formula::Exists(x, b) => Formula::exists(x, inc_prime(b, names, order)),
        Formula::Forall(x, b) => Formula::forall(x, inc_prime(b, names, order)),
        _ => phi.clone(),
    }
}

fn count_inc(phi: &Formula) -> usize {
    let mut n = 0;
    phi.walk(&mut |f| {
        if matches!(f, Formula::Inc(..)) {
            n += 1;
        }
    });
    n
}

/// `φᵢ′` for the inclusion occurrence with position `target` among the
/// inclusion atoms of `phi` (preorder, starting at `offset`).
fn inc_witness(
    phi: &Formula,
    names: &[String],
    incs: &[IncAtom],
    offset: usize,
    target: usize,
    u: &[Term],
    ctx: &TranslationContext,
) -> Formula {
    let prime = |f: &Formula, offset: usize| {
        let order: Vec<usize> = incs[offset..offset + count_inc(f)].iter().map(|a| a.index).collect();
        inc_prime(f, names, &mut order.into_iter())
    };
    match phi {
        Formula::Inc(a, b) => {
            let own = offset == target;
            let p = rel(&names[incs[offset].index], a);
            if own && !ctx.mutated(Mutation::IncDropBinding) {
                Formula::and(Formula::tuple_eq(u, b), p)
            } else {
                p
            }
        }
        Formula::And(a, b) => {
            let na = count_inc(a);
            Formula::and(
                inc_witness(a, names, incs, offset, target, u, ctx),
                inc_witness(b, names, incs, offset + na, target, u, ctx),
            )
        }
        Formula::Or(a, b) => {
            let na = count_inc(a);
            let nb = count_inc(b);
            if (offset..offset + na).contains(&target) {
                inc_witness(a, names, incs, offset, target, u, ctx)
            } else if (offset + na..offset + na + nb).contains(&target) {
                inc_witness(b, names, incs, offset + na, target, u, ctx)
            } else {
                Formula::or(
                    inc_witness(a, names, incs, offset, target, u, ctx),
                    inc_witness(b, names, incs, offset + na, target, u, ctx),
                )
            }
        }
        Formula::Exists(x, b) => Formula::exists(x, inc_witness(b, names, incs, offset, target, u, ctx)),
        Formula::Forall(x, b) => {
            let inner = Formula::exists(x, inc_witness(b, names, incs, offset, target, u, ctx));
            if ctx.mutated(Mutation::IncForallWeakened) {
                inner
            } else {
                Formula::and(inner, Formula::forall(x, prime(b, offset)))
            }
        }
        _ => phi.clone(),
    }
}

/// Checks that the formula is first-order apart from inclusion and
/// exclusion atoms, and that it has no atoms of the forbidden kind.
fn check_fragment(phi: &Formula, allow_inc: bool, allow_exc: bool) -> Result<(), TranslateError> {
    let mut err = None;
    phi.walk(&mut |f| match f {
        Formula::Inc(..) if !allow_inc => err = Some("inclusion atom"),
        Formula::Exc(..) if !allow_exc => err = Some("exclusion atom"),
        _ => {}
    });
    match err {
        Some(what) => Err(TranslateError::Fragment(format!("unexpected {what}"))),
        None => Ok(()),
    }
}

/// `∀ȳ(¬Rȳ ∨ (Rȳ ∧ φ′))`, or `φ′` alone when `ȳ` is empty.
fn guard(body: Formula, ys: &[String], ctx: &TranslationContext) -> Formula {
    if ys.is_empty() {
        return body;
    }
    let yt = var_tuple(ys);
    let r = &ctx.relvar;
    let inner = if ctx.mutated(Mutation::GuardDropNegR) {
        Formula::and(rel(r, &yt), body)
    } else {
        Formula::or(not_rel(r, &yt), Formula::and(rel(r, &yt), body))
    };
    Formula::forall_all(ys, inner)
}

fn finish(quantified: Vec<(String, usize)>, matrix: Formula, ys: &[String], ctx: &TranslationContext) -> EsoFormula {
    let mut free = BTreeSet::new();
    if !ys.is_empty() {
        free.insert((ctx.relvar.clone(), ys.len()));
    }
    EsoFormula { quantified, matrix, free_relvars: free }
}

/// The core of the inclusion translation, applied to a formula whose only
/// dependency atoms are inclusions. `names[j]` is the relation variable of
/// the atom occurrence with preorder index `j`.
fn inc_core(
    phi: &Formula,
    ys: &[String],
    names: &[String],
    inc_indices: Vec<usize>,
    ctx: &TranslationContext,
) -> Formula {
    let incs: Vec<IncAtom> = inc_indices.into_iter().map(|index| IncAtom { index }).collect();
    let order: Vec<usize> = incs.iter().map(|a| a.index).collect();
    let main = guard(inc_prime(phi, names, &mut order.into_iter()), ys, ctx);
    let mut taken: BTreeSet<String> = phi.all_vars();
    taken.extend(ys.iter().cloned());
    let u = fresh_tuple("u", ctx.k, &mut taken);
    let ut = var_tuple(&u);
    let mut parts = vec![main];
    for (pos, atom) in incs.iter().enumerate() {
        let witness = inc_witness(phi, names, &incs, 0, pos, &ut, ctx);
        let found = if ys.is_empty() {
            witness
        } else if ctx.mutated(Mutation::IncDropRowGuard) {
            Formula::exists_all(ys, witness)
        } else {
            Formula::exists_all(ys, Formula::and(rel(&ctx.relvar, &var_tuple(ys)), witness))
        };
        let clause = Formula::or(not_rel(&names[atom.index], &ut), found);
        parts.push(Formula::forall_all(&u, clause));
    }
    conj(parts)
}

fn inc_positions(phi: &Formula) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    phi.walk(&mut |f| match f {
        Formula::Inc(..) => {
            out.push(i);
            i += 1;
        }
        Formula::Exc(..) => i += 1,
        _ => {}
    });
    out
}

/// `EXC[k]` to `ESO[k]`: `∃P̄ ∀ȳ(¬Rȳ ∨ (Rȳ ∧ φ′))`.
pub fn exc_to_eso(phi: &Formula, ctx: &TranslationContext) -> Result<EsoFormula, TranslateError> {
    let (core, ys) = prepare(phi, ctx)?;
    check_fragment(&core, false, true)?;
    let n = atom_occurrences(&core);
    let names = relvar_names(n, &core, ctx);
    let mut used = Vec::new();
    let prime = replace_exclusions(&core, &names, &mut 0, &mut used, ctx);
    let quantified = used.iter().map(|&i| (names[i].clone(), ctx.k)).collect();
    Ok(finish(quantified, guard(prime, &ys, ctx), &ys, ctx))
}

/// `INC[k]` to `ESO[k]`.
pub fn inc_to_eso(phi: &Formula, ctx: &TranslationContext) -> Result<EsoFormula, TranslateError> {
    let (core, ys) = prepare(phi, ctx)?;
    check_fragment(&core, true, false)?;
    let n = atom_occurrences(&core);
    let names = relvar_names(n, &core, ctx);
    let positions = inc_positions(&core);
    let quantified = positions.iter().map(|&i| (names[i].clone(), ctx.k)).collect();
    let matrix = inc_core(&core, &ys, &names, positions, ctx);
    Ok(finish(quantified, matrix, &ys, ctx))
}

/// `INEX[k]` to `ESO[k]`: exclusion atoms are replaced first, then the
/// inclusion translation is applied to the result.
pub fn inex_to_eso(phi: &Formula, ctx: &TranslationContext) -> Result<EsoFormula, TranslateError> {
    let (core, ys) = prepare(phi, ctx)?;
    let n = atom_occurrences(&core);
    let names = relvar_names(n, &core, ctx);
    let positions = inc_positions(&core);
    let mut used = Vec::new();
    let stage1 = replace_exclusions(&core, &names, &mut 0, &mut used, ctx);
    let mut quantified: Vec<(String, usize)> = used.iter().map(|&i| (names[i].clone(), ctx.k)).collect();
    quantified.extend(positions.iter().map(|&i| (names[i].clone(), ctx.k)));
    let matrix = inc_core(&stage1, &ys, &names, positions, ctx);
    Ok(finish(quantified, matrix, &ys, ctx))
}

/// Substitutes the empty relation for `p`: `P t̄` becomes `t̄ ≠ t̄` and
/// `¬P t̄` becomes `t̄ = t̄`.
fn empty_substitution(phi: &Formula, p: &str) -> Formula {
    match phi {
        Formula::Rel(r, ts) if r == p => Formula::tuple_neq(ts, ts),
        Formula::NotRel(r, ts) if r == p => Formula::tuple_eq(ts, ts),
        Formula::And(a, b) => Formula::and(empty_substitution(a, p), empty_substitution(b, p)),
        Formula::Or(a, b) => Formula::or(empty_substitution(a, p), empty_substitution(b, p)),
        Formula::Exists(x, b) => Formula::exists(x, empty_substitution(b, p)),
        Formula::Forall(x, b) => Formula::forall(x, empty_substitution(b, p)),
        _ => phi.clone(),
    }
}

/// The non-emptiness normal form: the same prefix over a matrix `δ` such
/// that `Φ` holds iff some nonempty interpretations satisfy `δ`.
pub fn eso_nonempty_normal_form(phi: &EsoFormula) -> EsoFormula {
    let mut delta = phi.matrix.clone();
    for (p, _) in &phi.quantified {
        let emptied = empty_substitution(&delta, p);
        delta = Formula::or(delta, emptied);
    }
    EsoFormula { quantified: phi.quantified.clone(), matrix: delta, free_relvars: phi.free_relvars.clone() }
}

/// The tuples `ȳᵢ` used for each free relation variable, unpadded.
pub fn free_tuples(phi: &EsoFormula, ctx: &TranslationContext) -> Result<Vec<(String, Vec<String>)>, TranslateError> {
    let mut taken: BTreeSet<String> = phi.matrix.all_vars();
    for (_, vars) in &ctx.bindings {
        taken.extend(vars.iter().cloned());
    }
    let mut out = Vec::new();
    for (i, (r, arity)) in phi.free_relvars.iter().enumerate() {
        let vars = match ctx.bindings.iter().find(|(name, _)| name == r) {
            Some((_, vars)) => {
                if vars.len() != *arity {
                    return Err(TranslateError::Fragment(format!(
                        "`{r}` has arity {arity} but is bound to {} variables",
                        vars.len()
                    )));
                }
                if let Some(v) = vars.iter().find(|v| phi.matrix.all_vars().contains(*v)) {
                    return Err(TranslateError::Clash(format!("variable `{v}` occurs in the formula")));
                }
                vars.clone()
            }
            None => fresh_tuple(&format!("y{}", i + 1), *arity, &mut taken),
        };
        out.push((r.clone(), vars));
    }
    let all: Vec<&String> = out.iter().flat_map(|(_, v)| v).collect();
    if all.iter().collect::<BTreeSet<_>>().len() != all.len() {
        return Err(TranslateError::Clash("free tuples share a variable".into()));
    }
    Ok(out)
}

fn pad(ts: &[Term], k: usize) -> Vec<Term> {
    let mut out = ts.to_vec();
    let last = ts.last().cloned().expect("relation of positive arity");
    out.resize(k, last);
    out
}

fn eso_prime(phi: &Formula, targets: &[(String, Vec<Term>)], preserved: &[Vec<Term>], k: usize) -> Formula {
    let target = |r: &str| targets.iter().find(|(p, _)| p == r).map(|(_, w)| w.clone());
    match phi {
        Formula::Rel(r, ts) => match target(r) {
            Some(w) => Formula::Inc(pad(ts, k), w),
            None => phi.clone(),
        },
        Formula::NotRel(r, ts) => match target(r) {
            Some(w) => Formula::Exc(pad(ts, k), w),
            None => phi.clone(),
        },
        Formula::And(a, b) => {
            Formula::and(eso_prime(a, targets, preserved, k), eso_prime(b, targets, preserved, k))
        }
        Formula::Or(a, b) => {
            let (a, b) = (eso_prime(a, targets, preserved, k), eso_prime(b, targets, preserved, k));
            if preserved.is_empty() {
                Formula::or(a, b)
            } else {
                Formula::tvp(a, b, preserved.to_vec())
            }
        }
        Formula::Exists(x, b) => Formula::exists(x, eso_prime(b, targets, preserved, k)),
        Formula::Forall(x, b) => Formula::forall(x, eso_prime(b, targets, preserved, k)),
        _ => phi.clone(),
    }
}

/// `ESO[k]` to `INEX[k]`: `∃w̄₁…∃w̄ₙ δ′`. Correct on nonempty teams, with each
/// free relation variable `Rᵢ` read off as `X(ȳᵢ)`.
pub fn eso_to_inex(phi: &EsoFormula, ctx: &TranslationContext) -> Result<Formula, TranslateError> {
    let k = ctx.k;
    for (p, arity) in phi.quantified.iter().chain(phi.free_relvars.iter()) {
        if *arity > k {
            return Err(TranslateError::ArityExceeds { arity: *arity, k });
        }
        if *arity == 0 {
            return Err(TranslateError::Fragment(format!("relation variable `{p}` has arity 0")));
        }
    }
    let frees = free_tuples(phi, ctx)?;
    let normal = eso_nonempty_normal_form(phi);
    let mut taken: BTreeSet<String> = normal.matrix.all_vars();
    taken.extend(frees.iter().flat_map(|(_, v)| v.iter().cloned()));
    let mut targets = Vec::new();
    let mut ws = Vec::new();
    for (i, (p, _)) in phi.quantified.iter().enumerate() {
        let w = fresh_tuple(&format!("w{}", i + 1), k, &mut taken);
        targets.push((p.clone(), var_tuple(&w)));
        ws.push(w);
    }
    for (r, vars) in &frees {
        targets.push((r.clone(), pad(&var_tuple(vars), k)));
    }
    let preserved: Vec<Vec<Term>> = targets.iter().map(|(_, t)| t.clone()).collect();
    let body = eso_prime(&normal.matrix, &targets, &preserved, k);
    Ok(ws.iter().rev().fold(body, |acc, w| Formula::exists_all(w, acc)))
}

//! Rewriting of derived operators into the core language, relativization and
//! atom padding.

use std::collections::BTreeSet;

use super::ast::{conj, var_tuple, vars_of_tuple, Formula, Restriction, Term};
use super::SyntaxError;

/// Source of fresh variables in the reserved `$n` namespace.
#[derive(Clone, Debug)]
pub struct FreshSupply {
    next: usize,
}

impl FreshSupply {
    pub fn starting_at(next: usize) -> Self {
        FreshSupply { next }
    }

    /// A supply whose names avoid every reserved name already used in `fs`.
    pub fn avoiding<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> Self {
        let mut next = 0;
        for f in fs {
            for v in f.all_vars() {
                if let Some(n) = reserved_index(&v) {
                    next = next.max(n + 1);
                }
            }
        }
        FreshSupply { next }
    }

    pub fn fresh(&mut self) -> String {
        let name = format!("${}", self.next);
        self.next += 1;
        name
    }

    pub fn fresh_tuple(&mut self, k: usize) -> Vec<String> {
        (0..k).map(|_| self.fresh()).collect()
    }

    pub fn peek(&self) -> usize {
        self.next
    }
}

pub fn is_reserved(name: &str) -> bool {
    name.starts_with('$')
}

fn reserved_index(name: &str) -> Option<usize> {
    name.strip_prefix('$')?.parse().ok()
}

/// Rewrites every derived operator into literals, inclusion and exclusion atoms,
/// `∧`, `∨`, `∃` and `∀`.
pub fn desugar(phi: &Formula) -> Result<Formula, SyntaxError> {
    let mut supply = FreshSupply::avoiding([phi]);
    desugar_with(phi, &mut supply)
}

pub fn desugar_with(phi: &Formula, supply: &mut FreshSupply) -> Result<Formula, SyntaxError> {
    Ok(match phi {
        Formula::Eq(..)
        | Formula::NotEq(..)
        | Formula::Rel(..)
        | Formula::NotRel(..)
        | Formula::Inc(..)
        | Formula::Exc(..) => phi.clone(),
        Formula::EquiExt(a, b) => {
            Formula::and(Formula::Inc(a.clone(), b.clone()), Formula::Inc(b.clone(), a.clone()))
        }
        Formula::And(a, b) => Formula::and(desugar_with(a, supply)?, desugar_with(b, supply)?),
        Formula::Or(a, b) => Formula::or(desugar_with(a, supply)?, desugar_with(b, supply)?),
        Formula::Exists(x, b) => Formula::exists(x, desugar_with(b, supply)?),
        Formula::Forall(x, b) => Formula::forall(x, desugar_with(b, supply)?),
        Formula::Dep(t) => core_dep(t, supply),
        Formula::IOr(a, b) => {
            let a = desugar_with(a, supply)?;
            let b = desugar_with(b, supply)?;
            core_ior(a, b, supply)
        }
        Formula::Store { from, to, body } => {
            check_store(from, to)?;
            core_store(from, to, desugar_with(body, supply)?)
        }
        Formula::Restricted { kind, vars, bound, body } => {
            let body = desugar_with(body, supply)?;
            desugar_restricted(*kind, vars, bound, body, supply)?
        }
        Formula::TvpOr { left, right, preserved } => {
            let l = desugar_with(left, supply)?;
            let r = desugar_with(right, supply)?;
            core_tvp(l, r, preserved, supply)?
        }
        Formula::Relativized { body, var } => {
            let inner = desugar_with(body, supply)?;
            let rel = relativize_with(&inner, var, supply)?;
            desugar_with(&rel, supply)?
        }
    })
}

pub(crate) fn check_store(from: &[Term], to: &[String]) -> Result<(), SyntaxError> {
    let vs = vars_of_tuple(from);
    if let Some(u) = to.iter().find(|u| vs.contains(*u)) {
        return Err(SyntaxError::StoreOverlap(u.clone()));
    }
    if from.len() != to.len() {
        return Err(SyntaxError::Invalid(format!(
            "store maps {} terms to {} variables",
            from.len(),
            to.len()
        )));
    }
    Ok(())
}

/// `dep(t) := ∀x(x = t ∨ x | t)`.
fn core_dep(t: &Term, supply: &mut FreshSupply) -> Formula {
    let x = supply.fresh();
    Formula::forall(
        &x,
        Formula::or(
            Formula::Eq(Term::Var(x.clone()), t.clone()),
            Formula::Exc(vec![Term::Var(x.clone())], vec![t.clone()]),
        ),
    )
}

/// `φ ⊔ ψ := (γ₌₁ ∧ (φ ∨ ψ)) ∨ ∃z₁∃z₂(dep(z₁) ∧ dep(z₂) ∧ ((z₁=z₂ ∧ φ) ∨ (z₁≠z₂ ∧ ψ)))`
/// where `γ₌₁ := ∀z₁∀z₂ z₁=z₂`.
fn core_ior(a: Formula, b: Formula, supply: &mut FreshSupply) -> Formula {
    let z1 = supply.fresh();
    let z2 = supply.fresh();
    let (t1, t2) = (Term::Var(z1.clone()), Term::Var(z2.clone()));
    let gamma = Formula::forall(&z1, Formula::forall(&z2, Formula::Eq(t1.clone(), t2.clone())));
    let left = Formula::and(gamma, Formula::or(a.clone(), b.clone()));
    let choice = Formula::or(
        Formula::and(Formula::Eq(t1.clone(), t2.clone()), a),
        Formula::and(Formula::NotEq(t1.clone(), t2.clone()), b),
    );
    let body = conj(vec![core_dep(&t1, supply), core_dep(&t2, supply), choice]);
    Formula::or(left, Formula::exists(&z1, Formula::exists(&z2, body)))
}

/// `store t̄→ū φ := ∃ū(ū = t̄ ∧ φ)`.
fn core_store(from: &[Term], to: &[String], body: Formula) -> Formula {
    let eqs = Formula::tuple_eq(&var_tuple(to), from);
    Formula::exists_all(to, Formula::and(eqs, body))
}

fn desugar_restricted(
    kind: Restriction,
    xs: &[String],
    ts: &[Term],
    body: Formula,
    supply: &mut FreshSupply,
) -> Result<Formula, SyntaxError> {
    let k = ts.len();
    if xs.len() != k {
        return Err(SyntaxError::Invalid(format!(
            "restricted quantifier binds {} variables over {} terms",
            xs.len(),
            k
        )));
    }
    let x = var_tuple(xs);
    Ok(match kind {
        Restriction::ExistsSub | Restriction::ExistsExcl => {
            let u = supply.fresh_tuple(k);
            let atom = if kind == Restriction::ExistsSub {
                Formula::Inc(x, var_tuple(&u))
            } else {
                Formula::Exc(x, var_tuple(&u))
            };
            core_store(ts, &u, Formula::exists_all(xs, Formula::and(atom, body)))
        }
        Restriction::ForallSub | Restriction::ForallExcl => {
            let u = supply.fresh_tuple(k);
            let y = supply.fresh_tuple(k);
            let z = supply.fresh_tuple(k);
            let ut = var_tuple(&u);
            let (yt, zt) = (var_tuple(&y), var_tuple(&z));
            let (left, inner) = if kind == Restriction::ForallSub {
                (
                    Formula::forall_all(xs, Formula::and(Formula::Inc(x.clone(), ut.clone()), body.clone())),
                    Formula::or(
                        Formula::and(Formula::tuple_eq(&x, &yt), body),
                        Formula::tuple_eq(&x, &zt),
                    ),
                )
            } else {
                (
                    Formula::forall_all(xs, Formula::Inc(x.clone(), ut.clone())),
                    Formula::or(
                        Formula::tuple_eq(&x, &yt),
                        Formula::and(Formula::tuple_eq(&x, &zt), body),
                    ),
                )
            };
            let nested = Formula::restricted(
                Restriction::ExistsSub,
                y,
                ut.clone(),
                Formula::restricted(Restriction::ExistsExcl, z, ut, inner),
            );
            let right = Formula::forall_all(xs, desugar_with(&nested, supply)?);
            core_store(ts, &u, core_ior(left, right, supply))
        }
        Restriction::ForallSube => {
            if produces_inclusion(&body) {
                return Err(SyntaxError::SubeBody);
            }
            let u = supply.fresh_tuple(k);
            let y = supply.fresh_tuple(k);
            let yt = var_tuple(&y);
            let inner = Formula::restricted(
                Restriction::ExistsExcl,
                y,
                var_tuple(&u),
                Formula::or(Formula::tuple_eq(&yt, &x), body.clone()),
            );
            let right = core_store(ts, &u, Formula::forall_all(xs, desugar_with(&inner, supply)?));
            core_ior(Formula::forall_all(xs, body), right, supply)
        }
    })
}

/// Term value preserving disjunction, expanded per its definition with
/// `θᵢ` and `θᵢ'` for every preserved tuple.
fn core_tvp(
    a: Formula,
    b: Formula,
    preserved: &[Vec<Term>],
    supply: &mut FreshSupply,
) -> Result<Formula, SyntaxError> {
    if preserved.iter().any(Vec::is_empty) {
        return Err(SyntaxError::Invalid("empty preserved tuple".into()));
    }
    let cl = supply.fresh();
    let cr = supply.fresh();
    let y = supply.fresh();
    let (tl, tr, ty) = (Term::Var(cl.clone()), Term::Var(cr.clone()), Term::Var(y.clone()));
    let sides = Formula::or(
        Formula::and(Formula::Eq(ty.clone(), tl.clone()), a.clone()),
        Formula::and(Formula::Eq(ty.clone(), tr.clone()), b.clone()),
    );
    let mut parts = vec![sides];
    for t in preserved {
        for c in [&tl, &tr] {
            let cs = vec![c.clone(); t.len()];
            let z1 = supply.fresh_tuple(t.len());
            let z2 = supply.fresh_tuple(t.len());
            let (z1t, z2t) = (var_tuple(&z1), var_tuple(&z2));
            let left = conj(vec![
                Formula::Eq(ty.clone(), tl.clone()),
                Formula::tuple_eq(&z1t, t),
                Formula::tuple_eq(&z2t, &cs),
            ]);
            let right = conj(vec![
                Formula::Eq(ty.clone(), tr.clone()),
                Formula::tuple_eq(&z1t, &cs),
                Formula::tuple_eq(&z2t, t),
            ]);
            let body = conj(vec![
                Formula::or(left, right),
                Formula::Inc(t.clone(), z1t),
                Formula::Inc(t.clone(), z2t),
            ]);
            parts.push(Formula::exists_all(&z1, Formula::exists_all(&z2, body)));
        }
    }
    let split = conj(vec![
        core_dep(&tl, supply),
        core_dep(&tr, supply),
        Formula::NotEq(tl.clone(), tr.clone()),
        Formula::exists(&y, conj(parts)),
    ]);
    let plain = core_ior(a, b, supply);
    Ok(core_ior(plain, Formula::exists(&cl, Formula::exists(&cr, split)), supply))
}

/// Whether desugaring `phi` can produce an inclusion atom. Bodies of the
/// exclusion-logic universal quantifier must not.
pub fn produces_inclusion(phi: &Formula) -> bool {
    match phi {
        Formula::Inc(..) | Formula::EquiExt(..) | Formula::Relativized { .. } => true,
        Formula::Restricted { kind, body, .. } => {
            matches!(kind, Restriction::ExistsSub | Restriction::ForallSub | Restriction::ForallExcl)
                || produces_inclusion(body)
        }
        Formula::TvpOr { left, right, preserved } => {
            !preserved.is_empty() || produces_inclusion(left) || produces_inclusion(right)
        }
        _ => phi.children().into_iter().any(produces_inclusion),
    }
}

/// The relativization `φ↾y`: disjunctions preserve `y`, quantifiers range
/// over `X(y)`.
///
/// Core nodes follow the recursive definition. A term value preserving
/// disjunction keeps its tuples and additionally preserves `y`. Other derived
/// operators must be desugared first.
pub fn relativize(phi: &Formula, y: &str) -> Result<Formula, SyntaxError> {
    let mut supply = FreshSupply::avoiding([phi]);
    if let Some(n) = reserved_index(y) {
        supply = FreshSupply::starting_at(supply.peek().max(n + 1));
    }
    relativize_with(phi, y, &mut supply)
}

pub fn relativize_with(phi: &Formula, y: &str, supply: &mut FreshSupply) -> Result<Formula, SyntaxError> {
    let mut bound = BTreeSet::new();
    phi.walk(&mut |f| match f {
        Formula::Exists(x, _) | Formula::Forall(x, _) => {
            bound.insert(x.clone());
        }
        Formula::Restricted { vars, .. } => bound.extend(vars.iter().cloned()),
        Formula::Store { to, .. } => bound.extend(to.iter().cloned()),
        _ => {}
    });
    if bound.contains(y) {
        return Err(SyntaxError::RelativizeBound(y.to_string()));
    }
    relativize_rec(phi, y, supply)
}

fn relativize_rec(phi: &Formula, y: &str, supply: &mut FreshSupply) -> Result<Formula, SyntaxError> {
    let yt = vec![Term::var(y)];
    Ok(match phi {
        Formula::Eq(..)
        | Formula::NotEq(..)
        | Formula::Rel(..)
        | Formula::NotRel(..)
        | Formula::Inc(..)
        | Formula::Exc(..)
        | Formula::EquiExt(..) => phi.clone(),
        Formula::And(a, b) => Formula::and(relativize_rec(a, y, supply)?, relativize_rec(b, y, supply)?),
        Formula::Or(a, b) => Formula::tvp(relativize_rec(a, y, supply)?, relativize_rec(b, y, supply)?, vec![yt]),
        Formula::Exists(x, b) => {
            Formula::restricted(Restriction::ExistsSub, vec![x.clone()], yt, relativize_rec(b, y, supply)?)
        }
        Formula::Forall(x, b) => {
            Formula::restricted(Restriction::ForallSub, vec![x.clone()], yt, relativize_rec(b, y, supply)?)
        }
        Formula::TvpOr { left, right, preserved } => {
            let mut preserved = preserved.clone();
            preserved.push(yt);
            Formula::tvp(relativize_rec(left, y, supply)?, relativize_rec(right, y, supply)?, preserved)
        }
        _ => {
            let core = desugar_with(phi, supply)?;
            relativize_rec(&core, y, supply)?
        }
    })
}

/// Pads every inclusion, exclusion and equiextension atom to arity `k` by
/// repeating the last term of each tuple.
pub fn pad_atoms_to_arity(phi: &Formula, k: usize) -> Result<Formula, SyntaxError> {
    let pad = |ts: &[Term]| -> Result<Vec<Term>, SyntaxError> {
        if ts.len() > k {
            return Err(SyntaxError::ArityExceeds { arity: ts.len(), k });
        }
        let mut out = ts.to_vec();
        let last = ts.last().cloned().ok_or_else(|| SyntaxError::Invalid("empty tuple".into()))?;
        out.resize(k, last);
        Ok(out)
    };
    let rec = |f: &Formula| pad_atoms_to_arity(f, k).map(Box::new);
    Ok(match phi {
        Formula::Inc(a, b) => Formula::Inc(pad(a)?, pad(b)?),
        Formula::Exc(a, b) => Formula::Exc(pad(a)?, pad(b)?),
        Formula::EquiExt(a, b) => Formula::EquiExt(pad(a)?, pad(b)?),
        Formula::Eq(..) | Formula::NotEq(..) | Formula::Rel(..) | Formula::NotRel(..) | Formula::Dep(_) => {
            phi.clone()
        }
        Formula::And(a, b) => Formula::And(rec(a)?, rec(b)?),
        Formula::Or(a, b) => Formula::Or(rec(a)?, rec(b)?),
        Formula::IOr(a, b) => Formula::IOr(rec(a)?, rec(b)?),
        Formula::Exists(x, b) => Formula::Exists(x.clone(), rec(b)?),
        Formula::Forall(x, b) => Formula::Forall(x.clone(), rec(b)?),
        Formula::Store { from, to, body } => Formula::Store {
            from: from.clone(),
            to: to.clone(),
            body: rec(body)?,
        },
        Formula::Restricted { kind, vars, bound, body } => Formula::Restricted {
            kind: *kind,
            vars: vars.clone(),
            bound: bound.clone(),
            body: rec(body)?,
        },
        Formula::TvpOr { left, right, preserved } => Formula::TvpOr {
            left: rec(left)?,
            right: rec(right)?,
            preserved: preserved.clone(),
        },
        Formula::Relativized { body, var } => Formula::Relativized { body: rec(body)?, var: var.clone() },
    })
}

use std::collections::BTreeSet;

use super::ast::{vars_of_tuple, ArityProfile, Formula, Term};
use super::desugar::{check_store, desugar, relativize};
use super::SyntaxError;

/// Free variables `fr(φ)`, extended to the derived operators.
pub fn free_variables(phi: &Formula) -> BTreeSet<String> {
    match phi {
        Formula::Eq(a, b) | Formula::NotEq(a, b) => {
            let mut out = a.vars();
            b.vars_into(&mut out);
            out
        }
        Formula::Rel(_, ts) | Formula::NotRel(_, ts) => vars_of_tuple(ts),
        Formula::Inc(a, b) | Formula::Exc(a, b) | Formula::EquiExt(a, b) => {
            let mut out = vars_of_tuple(a);
            out.extend(vars_of_tuple(b));
            out
        }
        Formula::Dep(t) => t.vars(),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::IOr(a, b) => {
            let mut out = free_variables(a);
            out.extend(free_variables(b));
            out
        }
        Formula::Exists(x, b) | Formula::Forall(x, b) => {
            let mut out = free_variables(b);
            out.remove(x);
            out
        }
        Formula::Store { from, to, body } => {
            let mut out = free_variables(body);
            to.iter().for_each(|u| {
                out.remove(u);
            });
            out.extend(vars_of_tuple(from));
            out
        }
        Formula::Restricted { vars, bound, body, .. } => {
            let mut out = free_variables(body);
            vars.iter().for_each(|x| {
                out.remove(x);
            });
            out.extend(vars_of_tuple(bound));
            out
        }
        Formula::TvpOr { left, right, preserved } => {
            let mut out = free_variables(left);
            out.extend(free_variables(right));
            preserved.iter().for_each(|t| out.extend(vars_of_tuple(t)));
            out
        }
        Formula::Relativized { body, var } => match relativize(body, var) {
            Ok(r) => free_variables(&r),
            Err(_) => {
                let mut out = free_variables(body);
                out.insert(var.clone());
                out
            }
        },
    }
}

pub fn is_sentence(phi: &Formula) -> bool {
    free_variables(phi).is_empty()
}

/// Maximal arities of the inclusion and exclusion atoms occurring literally
/// in `phi`. Equiextension atoms count as inclusions.
pub fn raw_arity_profile(phi: &Formula) -> ArityProfile {
    let mut p = ArityProfile { max_inc: 0, max_exc: 0, has_inc: false, has_exc: false };
    phi.walk(&mut |f| match f {
        Formula::Inc(a, _) | Formula::EquiExt(a, _) => {
            p.has_inc = true;
            p.max_inc = p.max_inc.max(a.len());
        }
        Formula::Exc(a, _) => {
            p.has_exc = true;
            p.max_exc = p.max_exc.max(a.len());
        }
        _ => {}
    });
    p
}

/// Profile of the core formula obtained by desugaring.
pub fn arity_profile(phi: &Formula) -> Result<ArityProfile, SyntaxError> {
    Ok(raw_arity_profile(&desugar(phi)?))
}

/// Checks the structural invariants a parsed or constructed formula must
/// satisfy: matching tuple lengths, nonempty tuples, distinct bound tuples,
/// storing targets disjoint from stored terms, and inclusion-free bodies for
/// the exclusion-logic universal quantifier.
pub fn validate(phi: &Formula) -> Result<(), SyntaxError> {
    fn pair(a: &[Term], b: &[Term], what: &str) -> Result<(), SyntaxError> {
        if a.is_empty() || b.is_empty() {
            return Err(SyntaxError::Invalid(format!("{what} with an empty tuple")));
        }
        if a.len() != b.len() {
            return Err(SyntaxError::Invalid(format!(
                "{what} relates tuples of lengths {} and {}",
                a.len(),
                b.len()
            )));
        }
        Ok(())
    }
    fn distinct(xs: &[String]) -> Result<(), SyntaxError> {
        let set: BTreeSet<_> = xs.iter().collect();
        if set.len() != xs.len() {
            return Err(SyntaxError::Invalid("repeated variable in a bound tuple".into()));
        }
        Ok(())
    }
    let mut result = Ok(());
    phi.walk(&mut |f| {
        if result.is_err() {
            return;
        }
        result = match f {
            Formula::Inc(a, b) => pair(a, b, "inclusion atom"),
            Formula::Exc(a, b) => pair(a, b, "exclusion atom"),
            Formula::EquiExt(a, b) => pair(a, b, "equiextension atom"),
            Formula::Store { from, to, .. } => {
                distinct(to).and_then(|_| check_store(from, to)).and_then(|_| {
                    if to.is_empty() {
                        Err(SyntaxError::Invalid("store with an empty tuple".into()))
                    } else {
                        Ok(())
                    }
                })
            }
            Formula::Restricted { kind, vars, bound, body } => {
                let names: Vec<Term> = vars.iter().map(|v| Term::Var(v.clone())).collect();
                pair(&names, bound, "restricted quantifier")
                    .and_then(|_| distinct(vars))
                    .and_then(|_| {
                        if *kind == super::ast::Restriction::ForallSube
                            && super::desugar::produces_inclusion(body)
                        {
                            Err(SyntaxError::SubeBody)
                        } else {
                            Ok(())
                        }
                    })
            }
            Formula::TvpOr { preserved, .. } => {
                if preserved.iter().any(Vec::is_empty) {
                    Err(SyntaxError::Invalid("empty preserved tuple".into()))
                } else {
                    Ok(())
                }
            }
            Formula::Relativized { body, var } => relativize(body, var).map(|_| ()),
            _ => Ok(()),
        };
    });
    result
}

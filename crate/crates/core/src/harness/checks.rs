use std::collections::{BTreeSet, HashMap};

use serde_json::json;
use thiserror::Error;

use super::{batches, run, team_value, Batch, CaseSpace, Failure, Outcome, Report};
use crate::eso::{eso_satisfies, nonempty_witness_search, RelAssignment};
use crate::eval::{satisfies_singleton, EvalError, EvalMode, EvalOutcome, Evaluator};
use crate::structures::{restrict, team_values, Model, Relation, Team};
use crate::syntax::{desugar, free_variables, pretty_print, pretty_print_eso, var_tuple, EsoFormula, Formula};
use crate::translate::{
    eso_nonempty_normal_form, eso_to_inex, free_tuple, free_tuples, inex_to_eso, TranslateError, TranslationContext,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureProperty {
    Downward,
    Union,
    Flatness,
    Locality,
    EmptyTeam,
}

impl ClosureProperty {
    pub const ALL: [ClosureProperty; 5] = [
        ClosureProperty::Downward,
        ClosureProperty::Union,
        ClosureProperty::Flatness,
        ClosureProperty::Locality,
        ClosureProperty::EmptyTeam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClosureProperty::Downward => "downward",
            ClosureProperty::Union => "union",
            ClosureProperty::Flatness => "flatness",
            ClosureProperty::Locality => "locality",
            ClosureProperty::EmptyTeam => "empty-team",
        }
    }
}

fn symbols(phi: &Formula) -> BTreeSet<String> {
    phi.relation_symbols().into_iter().map(|(r, _)| r).collect()
}

/// A verdict, `None` on exhaustion.
fn verdict(r: Result<EvalOutcome, EvalError>) -> Result<Option<bool>, EvalError> {
    match r {
        Ok(o) => Ok(Some(o.value)),
        Err(EvalError::BudgetExhausted(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Compares two verdicts of the same case.
fn compare(
    left: Result<Option<bool>, EvalError>,
    right: Result<Option<bool>, EvalError>,
    fail: impl FnOnce(String) -> Failure,
) -> Outcome {
    match (left, right) {
        (Err(e), _) | (_, Err(e)) => Outcome::Fail(Box::new(fail(format!("error: {e}")))),
        (Ok(None), _) | (_, Ok(None)) => Outcome::Exhausted,
        (Ok(Some(a)), Ok(Some(b))) if a == b => Outcome::Pass,
        (Ok(Some(a)), Ok(Some(b))) => Outcome::Fail(Box::new(fail(format!("left {a}, right {b}")))),
    }
}

/// Team evaluation memoized on the restriction of the team to the free
/// variables of the formula.
struct Local {
    ev: Evaluator,
    fr: BTreeSet<String>,
}

impl Local {
    fn new(phi: &Formula, budget: crate::eval::EvalBudget) -> Result<Self, EvalError> {
        let fr = free_variables(phi);
        let domain: Vec<String> = fr.iter().cloned().collect();
        Ok(Local { ev: Evaluator::new(phi, &domain, budget)?, fr })
    }

    fn eval(&self, m: &Model, x: &Team, memo: &mut HashMap<Team, Result<Option<bool>, EvalError>>) -> Result<Option<bool>, EvalError> {
        let key = restrict(x, &self.fr).expect("free variables in the domain");
        memo.entry(key).or_insert_with_key(|k| verdict(self.ev.eval(m, k))).clone()
    }
}

fn check_domain(vars: &[String], space: &CaseSpace) -> Result<(), CheckError> {
    match vars.iter().find(|v| !space.domain.contains(v)) {
        Some(v) => Err(CheckError::Invalid(format!("variable `{v}` is not in the team domain"))),
        None => Ok(()),
    }
}

/// `M ⊨_X φ` against `M[X(ȳ)/R] ⊨ Φ` for the translation of `φ` into ESO.
/// Sentences translated without a free tuple are compared on nonempty
/// teams only.
pub fn check_equivalence_inex_eso(
    phi: &Formula,
    ctx: &TranslationContext,
    space: &CaseSpace,
) -> Result<Report, CheckError> {
    forward(phi, ctx, space, false)
}

pub(crate) fn forward(
    phi: &Formula,
    ctx: &TranslationContext,
    space: &CaseSpace,
    stop_early: bool,
) -> Result<Report, CheckError> {
    let out = inex_to_eso(phi, ctx)?;
    let ys = free_tuple(phi, ctx);
    check_domain(&ys, space)?;
    check_domain(&free_variables(phi).into_iter().collect::<Vec<_>>(), space)?;
    let local = Local::new(phi, space.budget)?;
    let text = pretty_print(phi);
    let yt = var_tuple(&ys);
    let bs = batches(space, &symbols(phi));
    Ok(run(&format!("forward {text}"), &bs, stop_early, |b| {
        let mut cache: HashMap<BTreeSet<Vec<u8>>, Result<Option<bool>, EvalError>> = HashMap::new();
        let mut memo = HashMap::new();
        let m = &b.model;
        b.teams
            .iter()
            .filter(|x| !(ys.is_empty() && x.is_empty()))
            .map(|x| {
                let image = team_values(m, x, &yt).expect("terms over the domain");
                let eso_value = cache
                    .entry(image.clone())
                    .or_insert_with(|| {
                        let mut free = RelAssignment::new();
                        if !ys.is_empty() {
                            let r = Relation::from_tuples(m.size(), ys.len(), &image).expect("tuples in the universe");
                            free.insert(ctx.relvar.clone(), r);
                        }
                        verdict(eso_satisfies(m, &out, &free, &space.budget))
                    })
                    .clone();
                compare(local.eval(m, x, &mut memo), eso_value, |d| {
                    Failure::new(&text, m, team_value(x), format!("team semantics vs ESO: {d}"))
                })
            })
            .collect()
    }))
}

/// `M[X(ȳ₁)/R₁,…] ⊨ Φ` against `M ⊨_X φ` for the translation of `Φ` into
/// inclusion-exclusion logic, on nonempty teams.
pub fn check_equivalence_eso_inex(
    phi: &EsoFormula,
    ctx: &TranslationContext,
    space: &CaseSpace,
) -> Result<Report, CheckError> {
    let out = eso_to_inex(phi, ctx)?;
    let tuples = free_tuples(phi, ctx)?;
    for (_, vars) in &tuples {
        check_domain(vars, space)?;
    }
    check_domain(&free_variables(&out).into_iter().collect::<Vec<_>>(), space)?;
    let local = Local::new(&out, space.budget)?;
    let text = pretty_print_eso(phi);
    let bs = batches(space, &symbols(&phi.matrix));
    Ok(run(&format!("backward {text}"), &bs, false, |b| {
        let m = &b.model;
        let mut cache: HashMap<Vec<Relation>, Result<Option<bool>, EvalError>> = HashMap::new();
        let mut memo = HashMap::new();
        b.teams
            .iter()
            .filter(|x| !x.is_empty())
            .map(|x| {
                let images: Vec<Relation> = tuples
                    .iter()
                    .map(|(_, vars)| {
                        let image = team_values(m, x, &var_tuple(vars)).expect("terms over the domain");
                        Relation::from_tuples(m.size(), vars.len(), image).expect("tuples in the universe")
                    })
                    .collect();
                let eso_value = cache
                    .entry(images.clone())
                    .or_insert_with(|| {
                        let free = tuples.iter().map(|(r, _)| r.clone()).zip(images).collect();
                        verdict(eso_satisfies(m, phi, &free, &space.budget))
                    })
                    .clone();
                compare(eso_value, local.eval(m, x, &mut memo), |d| {
                    Failure::new(&text, m, team_value(x), format!("ESO vs team semantics: {d}"))
                })
            })
            .collect()
    }))
}

/// Every interpretation of the free relation variables over `m`.
fn interpretations(m: &Model, free: &BTreeSet<(String, usize)>) -> Vec<RelAssignment> {
    let n = m.size();
    let mut out = vec![RelAssignment::new()];
    for (name, arity) in free {
        let slots = n.pow(*arity as u32);
        out = out
            .into_iter()
            .flat_map(|base| {
                (0u64..1 << slots).map(move |mask| {
                    let bits = (0..slots).map(|j| mask >> j & 1 == 1).collect();
                    let mut a = base.clone();
                    a.insert(name.clone(), Relation::from_bits(n, *arity, bits));
                    a
                })
            })
            .collect();
    }
    out
}

/// `M ⊨ Φ` against the existence of nonempty interpretations satisfying the
/// normal form `δ`, over every interpretation of the free relation
/// variables. Each witness is re-checked by evaluating `δ` under it.
pub fn check_nonempty_normal_form(phi: &EsoFormula, space: &CaseSpace) -> Result<Report, CheckError> {
    let delta = eso_nonempty_normal_form(phi);
    let mut fixed = delta.clone();
    fixed.quantified.clear();
    fixed.free_relvars.extend(phi.quantified.iter().cloned());
    let text = pretty_print_eso(phi);
    let mut single = space.clone();
    single.max_rows = 0;
    let bs = batches(&single, &symbols(&phi.matrix));
    Ok(run(&format!("normal form {text}"), &bs, false, |b| {
        let m = &b.model;
        interpretations(m, &phi.free_relvars)
            .into_iter()
            .map(|free| {
                let fail = |d: String| {
                    let bound: serde_json::Map<String, serde_json::Value> =
                        free.iter().map(|(r, rel)| (r.clone(), json!(rel.tuples().collect::<Vec<_>>()))).collect();
                    Failure::new(&text, m, json!({ "relations": bound }), d)
                };
                let direct = verdict(eso_satisfies(m, phi, &free, &space.budget));
                let witness = match nonempty_witness_search(m, &delta, &free, &space.budget) {
                    Ok(w) => w,
                    Err(EvalError::BudgetExhausted(_)) => return Outcome::Exhausted,
                    Err(e) => return Outcome::Fail(Box::new(fail(format!("error: {e}")))),
                };
                if let Some(w) = &witness {
                    let mut all = free.clone();
                    all.extend(w.iter().map(|(r, rel)| (r.clone(), rel.clone())));
                    let ok = w.values().all(|r| !r.is_empty())
                        && matches!(eso_satisfies(m, &fixed, &all, &space.budget), Ok(o) if o.value);
                    if !ok {
                        return Outcome::Fail(Box::new(fail("witness does not satisfy the normal form".into())));
                    }
                }
                compare(direct, Ok(Some(witness.is_some())), |d| fail(format!("ESO vs nonempty witness: {d}")))
            })
            .collect()
    }))
}

/// Native evaluation of the derived operators in `phi` against evaluation
/// of its expansion into the core language.
pub fn check_operator(phi: &Formula, space: &CaseSpace) -> Result<Report, CheckError> {
    let core = desugar(phi).map_err(EvalError::from)?;
    let native = Evaluator::new(phi, &space.domain, space.budget.mode(EvalMode::NativeSugar))?;
    let expanded = Evaluator::new(&core, &space.domain, space.budget.mode(EvalMode::CoreOnly))?;
    let text = pretty_print(phi);
    let bs = batches(space, &symbols(phi));
    Ok(run(&format!("operator {text}"), &bs, false, |b| {
        b.teams
            .iter()
            .map(|x| {
                compare(verdict(native.eval(&b.model, x)), verdict(expanded.eval(&b.model, x)), |d| {
                    Failure::new(&text, &b.model, team_value(x), format!("native vs expanded: {d}"))
                })
            })
            .collect()
    }))
}

struct Memo<'a> {
    ev: &'a Evaluator,
    m: &'a Model,
    seen: HashMap<Team, Result<Option<bool>, EvalError>>,
}

impl Memo<'_> {
    fn get(&mut self, x: &Team) -> Result<Option<bool>, EvalError> {
        if let Some(v) = self.seen.get(x) {
            return v.clone();
        }
        let v = verdict(self.ev.eval(self.m, x));
        self.seen.insert(x.clone(), v.clone());
        v
    }
}

/// Checks a closure property of `phi` on every case of the space.
pub fn check_closure(phi: &Formula, property: ClosureProperty, space: &CaseSpace) -> Result<Report, CheckError> {
    let ev = Evaluator::new(phi, &space.domain, space.budget)?;
    let fr: BTreeSet<String> = free_variables(phi);
    let local_domain: Vec<String> = fr.iter().cloned().collect();
    let local = Evaluator::new(phi, &local_domain, space.budget)?;
    let first_order = phi.is_first_order();
    let text = pretty_print(phi);
    let bs = batches(space, &symbols(phi));
    let suite = format!("{} {text}", property.name());
    Ok(run(&suite, &bs, false, |b: &Batch| {
        let m = &b.model;
        let mut memo = Memo { ev: &ev, m, seen: HashMap::new() };
        let fail = |team: serde_json::Value, d: String| Outcome::Fail(Box::new(Failure::new(&text, m, team, d)));
        match property {
            ClosureProperty::EmptyTeam => {
                let empty = Team::new(space.domain.clone()).expect("distinct domain");
                vec![compare(memo.get(&empty), Ok(Some(true)), |d| {
                    Failure::new(&text, m, team_value(&empty), format!("empty team: {d}"))
                })]
            }
            ClosureProperty::Flatness => b
                .teams
                .iter()
                .map(|x| {
                    let mut rows = Ok(Some(true));
                    for row in x.rows() {
                        let single = Team::from_rows(space.domain.clone(), [row.clone()]).expect("row over the domain");
                        let v = memo.get(&single);
                        if first_order {
                            let s = single.assignments().next().expect("one row");
                            if v != Ok(Some(satisfies_singleton(m, &s, phi).expect("first-order formula"))) {
                                return fail(team_value(&single), "singleton team vs Tarski semantics".into());
                            }
                        }
                        rows = match (rows, v) {
                            (Err(e), _) | (_, Err(e)) => Err(e),
                            (Ok(None), _) | (_, Ok(None)) => Ok(None),
                            (Ok(Some(a)), Ok(Some(c))) => Ok(Some(a && c)),
                        };
                    }
                    compare(memo.get(x), rows, |d| Failure::new(&text, m, team_value(x), format!("team vs rows: {d}")))
                })
                .collect(),
            ClosureProperty::Locality => b
                .teams
                .iter()
                .map(|x| {
                    let r = restrict(x, &fr).expect("free variables in the domain");
                    compare(memo.get(x), verdict(local.eval(m, &r)), |d| {
                        Failure::new(&text, m, team_value(x), format!("team vs restriction: {d}"))
                    })
                })
                .collect(),
            ClosureProperty::Downward => {
                let mut out = Vec::new();
                for x in b.teams.iter() {
                    match memo.get(x) {
                        Ok(Some(true)) => {}
                        Ok(Some(false)) => {
                            out.push(Outcome::Pass);
                            continue;
                        }
                        Ok(None) => {
                            out.push(Outcome::Exhausted);
                            continue;
                        }
                        Err(e) => {
                            out.push(fail(team_value(x), format!("error: {e}")));
                            continue;
                        }
                    }
                    let mut outcome = Outcome::Pass;
                    for y in x.subteams() {
                        match memo.get(&y) {
                            Ok(Some(true)) => {}
                            Ok(None) => outcome = Outcome::Exhausted,
                            Ok(Some(false)) => {
                                outcome = fail(
                                    json!({ "team": team_value(x), "subteam": team_value(&y) }),
                                    "subteam of a satisfying team fails".into(),
                                );
                                break;
                            }
                            Err(e) => {
                                outcome = fail(team_value(&y), format!("error: {e}"));
                                break;
                            }
                        }
                    }
                    out.push(outcome);
                }
                out
            }
            ClosureProperty::Union => {
                let good: Vec<&Team> = b.teams.iter().filter(|x| memo.get(x) == Ok(Some(true))).collect();
                let mut out = Vec::new();
                for (i, x1) in good.iter().enumerate() {
                    for x2 in &good[i + 1..] {
                        let u = x1.union(x2).expect("same domain");
                        out.push(compare(memo.get(&u), Ok(Some(true)), |d| {
                            Failure::new(
                                &text,
                                m,
                                json!({ "x1": team_value(x1), "x2": team_value(x2) }),
                                format!("union of satisfying teams: {d}"),
                            )
                        }));
                    }
                }
                out
            }
        }
    }))
}

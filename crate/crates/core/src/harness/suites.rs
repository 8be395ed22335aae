use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use petgraph::algo::{connected_components, is_cyclic_directed};
use petgraph::graph::{DiGraph, UnGraph};
use serde_json::{json, Value};

use super::checks::{self, forward, CheckError, ClosureProperty};
use super::corpus::{self, Entry, Group};
use super::{batches, run, team_value, Batch, CaseSpace, Failure, Outcome, Report};
use crate::eso::{eso_satisfies, RelAssignment};
use crate::eval::{EvalBudget, EvalError, Evaluator};
use crate::structures::{restrict, team_values, Elem, Model, Relation, Team};
use crate::syntax::{parse_eso, pretty_print, relativize, var_tuple, Formula, Vocabulary};
use crate::translate::{Mutation, TranslationContext};

/// A report holding a single failure for a check that could not run.
fn error_report(suite: &str, formula: &str, e: CheckError) -> Report {
    let mut r = Report::new(suite);
    r.record(
        Outcome::Fail(Box::new(Failure {
            formula: formula.into(),
            model: Value::Null,
            team: Value::Null,
            detail: format!("check failed to run: {e}"),
        })),
        0,
    );
    r
}

fn merge_all(suite: &str, parts: impl IntoIterator<Item = (String, Result<Report, CheckError>)>) -> Report {
    let mut out = Report::new(suite);
    for (formula, part) in parts {
        out.merge(part.unwrap_or_else(|e| error_report(suite, &formula, e)));
    }
    out
}

fn context(e: &Entry, space: &CaseSpace) -> TranslationContext {
    TranslationContext::new(e.arity(), space.vocab.clone())
}

/// The forward translation on every forward corpus entry.
pub fn run_forward_suite(space: &CaseSpace) -> Report {
    merge_all(
        "forward",
        corpus::group(Group::Forward)
            .map(|e| (e.text.to_string(), checks::check_equivalence_inex_eso(&e.formula(), &context(e, space), space))),
    )
}

/// The backward translation on every ESO corpus entry, over nonempty teams
/// of `y1`, `y2`.
pub fn run_backward_suite(space: &CaseSpace) -> Report {
    let space = space.clone().with_domain(&["y1", "y2"]).nonempty();
    merge_all(
        "backward",
        corpus::group(Group::Backward).map(|e| {
            (e.text.to_string(), checks::check_equivalence_eso_inex(&e.eso_formula(), &context(e, &space), &space))
        }),
    )
}

/// The nonempty normal form on every ESO corpus entry.
pub fn run_normal_form_suite(space: &CaseSpace) -> Report {
    merge_all(
        "normal-form",
        corpus::group(Group::Backward)
            .map(|e| (e.text.to_string(), checks::check_nonempty_normal_form(&e.eso_formula(), space))),
    )
}

/// Native against expanded evaluation, one report per derived operator.
pub fn run_operator_suite(space: &CaseSpace) -> Vec<(&'static str, Report)> {
    corpus::group(Group::Operator)
        .map(|e| {
            let r = checks::check_operator(&e.formula(), space).unwrap_or_else(|err| error_report(e.name, e.text, err));
            (e.name, r)
        })
        .collect()
}

/// Flatness, locality and the empty team property for first-order
/// entries, downward closure for exclusion entries and union closure for
/// inclusion entries.
pub fn run_closure_suite(space: &CaseSpace) -> Report {
    let mut parts = Vec::new();
    for e in corpus::group(Group::FirstOrder) {
        for p in [ClosureProperty::Flatness, ClosureProperty::Locality, ClosureProperty::EmptyTeam] {
            parts.push((e.text.to_string(), checks::check_closure(&e.formula(), p, space)));
        }
    }
    for e in corpus::group(Group::Exclusion) {
        parts.push((e.text.to_string(), checks::check_closure(&e.formula(), ClosureProperty::Downward, space)));
    }
    for e in corpus::group(Group::Inclusion) {
        parts.push((e.text.to_string(), checks::check_closure(&e.formula(), ClosureProperty::Union, space)));
    }
    merge_all("closures", parts)
}

fn verdict_outcome(
    formula: &str,
    m: &Model,
    team: Value,
    got: Result<bool, EvalError>,
    expected: bool,
    what: &str,
) -> Outcome {
    match got {
        Ok(v) if v == expected => Outcome::Pass,
        Ok(v) => Outcome::Fail(Box::new(Failure::new(formula, m, team, format!("{what}: got {v}, expected {expected}")))),
        Err(EvalError::BudgetExhausted(_)) => Outcome::Exhausted,
        Err(e) => Outcome::Fail(Box::new(Failure::new(formula, m, team, format!("{what}: error: {e}")))),
    }
}

fn value(ev: &Evaluator, m: &Model, x: &Team) -> Result<bool, EvalError> {
    ev.eval(m, x).map(|o| o.value)
}

/// The quantifier closure counterexamples on `M = {0, 1, 2}` with
/// `X₁ = {x ↦ 0, y ↦ 1}` and `X₂ = {x ↦ 1, y ↦ 0}`.
pub fn run_counterexample_suite() -> Report {
    let m = Model::new(3).expect("nonempty universe");
    let xy = vec!["x".to_string(), "y".to_string()];
    let x1 = Team::from_rows(xy.clone(), [vec![0, 1]]).expect("rows over the domain");
    let x2 = Team::from_rows(xy.clone(), [vec![1, 0]]).expect("rows over the domain");
    let both = x1.union(&x2).expect("same domain");
    let expected = [
        ("observation-a", [true, true, false]),
        ("observation-b", [true, true, false]),
        ("observation-c", [false, false, true]),
    ];
    let mut report = Report::new("counterexamples");
    for (name, verdicts) in expected {
        let e = corpus::entry(name).expect("corpus entry");
        let ev = Evaluator::new(&e.formula(), &xy, EvalBudget::default());
        for (x, want) in [&x1, &x2, &both].into_iter().zip(verdicts) {
            let got = ev.as_ref().map_err(|e| e.clone()).and_then(|ev| value(ev, &m, x));
            report.record(verdict_outcome(e.text, &m, team_value(x), got, want, name), 1);
        }
    }
    report
}

fn graph_model(n: usize, edges: &[(Elem, Elem)]) -> Model {
    let e = Relation::from_tuples(n, 2, edges.iter().map(|&(a, b)| [a, b])).expect("edges in the universe");
    let mut m = Model::new(n).expect("nonempty universe");
    m.set_relation("E", e).expect("fresh symbol");
    m
}

fn two_colourable(n: usize, edges: &[(Elem, Elem)]) -> bool {
    (0u32..1 << n).any(|c| edges.iter().all(|&(a, b)| (c >> a & 1) != (c >> b & 1)))
}

/// Graph sentences against oracles: disconnectedness and 2-colourability
/// on every undirected graph with at most `max_vertices` vertices, and the
/// cycle sentence on every directed graph with at most 3 vertices.
pub fn run_graph_suite(max_vertices: usize, budget: EvalBudget) -> Report {
    let sentence = |name: &str| corpus::entry(name).expect("corpus entry").formula();
    let (disconnected, colourable, cycle) =
        (sentence("disconnected"), sentence("two-colourable"), sentence("cycle"));
    let mut report = Report::new("graphs");
    let mut evaluators = Vec::new();
    for phi in [&disconnected, &colourable, &cycle] {
        match Evaluator::new(phi, &[], budget) {
            Ok(ev) => evaluators.push(ev),
            Err(e) => report.merge(error_report("graphs", &pretty_print(phi), e.into())),
        }
    }
    if !report.passed() {
        return report;
    }

    let mut undirected = Vec::new();
    let mut oracles: HashMap<Relation, [bool; 2]> = HashMap::new();
    for n in 1..=max_vertices {
        let pairs: Vec<(Elem, Elem)> = (0..n as Elem).flat_map(|a| (a + 1..n as Elem).map(move |b| (a, b))).collect();
        for edges in edge_sets(&pairs) {
            let mut g = UnGraph::<(), ()>::default();
            let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
            for &(a, b) in &edges {
                g.add_edge(nodes[a as usize], nodes[b as usize], ());
            }
            let sym: Vec<(Elem, Elem)> = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
            let m = graph_model(n, &sym);
            oracles.insert(edge_relation(&m), [connected_components(&g) > 1, two_colourable(n, &edges)]);
            undirected.push(unit_batch(m));
        }
    }
    for (i, name) in ["disconnected", "two-colourable"].into_iter().enumerate() {
        let text = pretty_print(if i == 0 { &disconnected } else { &colourable });
        report.merge(run("graphs", &undirected, false, |b| {
            let want = oracles[&edge_relation(&b.model)][i];
            let got = value(&evaluators[i], &b.model, &Team::unit());
            vec![verdict_outcome(&text, &b.model, team_value(&Team::unit()), got, want, name)]
        }));
    }

    let mut directed = Vec::new();
    let mut cyclic: HashMap<Relation, bool> = HashMap::new();
    for n in 1..=max_vertices.min(3) {
        let pairs: Vec<(Elem, Elem)> = (0..n as Elem).flat_map(|a| (0..n as Elem).map(move |b| (a, b))).collect();
        for edges in edge_sets(&pairs) {
            let mut g = DiGraph::<(), ()>::default();
            let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
            for &(a, b) in &edges {
                g.add_edge(nodes[a as usize], nodes[b as usize], ());
            }
            let m = graph_model(n, &edges);
            cyclic.insert(edge_relation(&m), is_cyclic_directed(&g));
            directed.push(unit_batch(m));
        }
    }
    let text = pretty_print(&cycle);
    report.merge(run("graphs", &directed, false, |b| {
        let want = cyclic[&edge_relation(&b.model)];
        let got = value(&evaluators[2], &b.model, &Team::unit());
        vec![verdict_outcome(&text, &b.model, team_value(&Team::unit()), got, want, "cycle")]
    }));
    report
}

fn edge_sets(pairs: &[(Elem, Elem)]) -> impl Iterator<Item = Vec<(Elem, Elem)>> + '_ {
    (0u64..1 << pairs.len())
        .map(move |mask| pairs.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, &e)| e).collect())
}

fn edge_relation(m: &Model) -> Relation {
    m.relation("E").expect("edge relation").clone()
}

fn unit_batch(model: Model) -> Batch {
    Batch { model, weight: 1, teams: Arc::new(vec![Team::unit()]) }
}

/// The relation `X(x̄)` as a binding of `F`.
fn image(m: &Model, x: &Team, vars: &[String]) -> Relation {
    let tuples = team_values(m, x, &var_tuple(vars)).expect("terms over the domain");
    Relation::from_tuples(m.size(), vars.len(), tuples).expect("tuples in the universe")
}

/// `δ_inf` is false on every model of at most `space.max_universe`
/// elements and `δ_inf↾y` is false on every nonempty team of the space.
/// The function formulas `ψ₁`, `ψ₂`, `ψ_inj`, `ψ_surj` are compared against
/// first-order descriptions of `F = X(x₁x₂)` on models of at most 2
/// elements.
pub fn run_infinity_suite(space: &CaseSpace) -> Report {
    let mut report = Report::new("infinity");
    let delta_entry = corpus::entry("delta-inf").expect("corpus entry");
    let delta = delta_entry.formula();

    let sizes: Vec<Batch> = (1..=space.max_universe).map(|n| unit_batch(Model::new(n).expect("nonempty universe"))).collect();
    match Evaluator::new(&delta, &[], space.budget) {
        Ok(ev) => report.merge(run("infinity", &sizes, false, |b| {
            vec![verdict_outcome(delta_entry.text, &b.model, team_value(&Team::unit()), value(&ev, &b.model, &Team::unit()), false, "delta-inf")]
        })),
        Err(e) => report.merge(error_report("infinity", delta_entry.text, e.into())),
    }

    let relativized = relativize(&delta, "y").map_err(EvalError::from);
    let teams = space.clone().nonempty();
    match relativized.and_then(|phi| Ok((Evaluator::new(&phi, &teams.domain, space.budget)?, pretty_print(&phi)))) {
        Ok((ev, text)) => {
            let y = vec!["y".to_string()];
            report.merge(run("infinity", &batches(&teams, &BTreeSet::new()), false, |b| {
                let mut seen: HashMap<Relation, Outcome> = HashMap::new();
                b.teams
                    .iter()
                    .map(|x| {
                        let key = image(&b.model, x, &y);
                        if let Some(o) = seen.get(&key) {
                            return match o {
                                Outcome::Pass => Outcome::Pass,
                                Outcome::Exhausted => Outcome::Exhausted,
                                Outcome::Fail(f) => Outcome::Fail(f.clone()),
                            };
                        }
                        let o = verdict_outcome(&text, &b.model, team_value(x), value(&ev, &b.model, x), false, "relativized delta-inf");
                        let copy = match &o {
                            Outcome::Pass => Outcome::Pass,
                            Outcome::Exhausted => Outcome::Exhausted,
                            Outcome::Fail(f) => Outcome::Fail(f.clone()),
                        };
                        seen.insert(key, copy);
                        o
                    })
                    .collect()
            }));
        }
        Err(e) => report.merge(error_report("infinity", "rel y (delta-inf)", e.into())),
    }

    let oracles = [
        ("psi-1", "forall v. exists z. F(v, z)"),
        ("psi-2", "forall v. forall z1. forall z2. !F(v, z1) or !F(v, z2) or z1 = z2"),
        ("psi-inj", "forall v1. forall v2. forall z. !F(v1, z) or !F(v2, z) or v1 = v2"),
        ("psi-surj", "forall z. exists v. F(v, z)"),
    ];
    let mut fspace = CaseSpace::new(space.max_universe.min(2), 4, &["x1", "x2"]).nonempty().with_budget(space.budget);
    fspace.vocab = Vocabulary::new();
    let fbatches = batches(&fspace, &BTreeSet::new());
    let vars = fspace.domain.clone();
    for (name, oracle) in oracles {
        let e = corpus::entry(name).expect("corpus entry");
        let eso = parse_eso(oracle, &Vocabulary::new()).expect("oracle parses");
        let ev = match Evaluator::new(&e.formula(), &vars, space.budget) {
            Ok(ev) => ev,
            Err(err) => {
                report.merge(error_report("infinity", e.text, err.into()));
                continue;
            }
        };
        report.merge(run("infinity", &fbatches, false, |b| {
            b.teams
                .iter()
                .map(|x| {
                    let f: RelAssignment = [("F".to_string(), image(&b.model, x, &vars))].into_iter().collect();
                    match eso_satisfies(&b.model, &eso, &f, &space.budget) {
                        Ok(o) => verdict_outcome(e.text, &b.model, team_value(x), value(&ev, &b.model, x), o.value, name),
                        Err(EvalError::BudgetExhausted(_)) => Outcome::Exhausted,
                        Err(err) => verdict_outcome(e.text, &b.model, team_value(x), Err(err), true, name),
                    }
                })
                .collect()
        }));
    }
    report
}

/// `M ⊨_X φ↾y` against `M↾X(y) ⊨ φ` for the relativization corpus, on
/// teams with nonempty `X(y)`.
pub fn run_relativization_suite(space: &CaseSpace) -> Report {
    let space = space.clone().nonempty();
    let y = vec!["y".to_string()];
    let ys: BTreeSet<String> = y.iter().cloned().collect();
    let mut parts = Vec::new();
    for e in corpus::group(Group::Relativization) {
        let phi = e.formula();
        let rel = Formula::Relativized { body: Box::new(phi.clone()), var: "y".into() };
        let evs = Evaluator::new(&rel, &y, space.budget)
            .and_then(|a| Ok((a, Evaluator::new(&phi, &[], space.budget)?)));
        let symbols = phi.relation_symbols().into_iter().map(|(r, _)| r).collect();
        let text = pretty_print(&rel);
        let part = evs.map_err(CheckError::from).map(|(relativized, plain)| {
            run("relativization", &batches(&space, &symbols), false, |b| {
                let m = &b.model;
                let mut cache: HashMap<Relation, Result<bool, EvalError>> = HashMap::new();
                let mut memo: HashMap<Team, Result<bool, EvalError>> = HashMap::new();
                b.teams
                    .iter()
                    .map(|x| {
                        let key = image(m, x, &y);
                        let sub = cache
                            .entry(key.clone())
                            .or_insert_with(|| {
                                let elems: BTreeSet<Elem> = key.tuples().map(|t| t[0]).collect();
                                let sm = m.submodel(&elems).map_err(EvalError::from)?;
                                value(&plain, &sm, &Team::unit())
                            })
                            .clone();
                        let got = memo
                            .entry(restrict(x, &ys).expect("y in the domain"))
                            .or_insert_with_key(|k| value(&relativized, m, k))
                            .clone();
                        match sub {
                            Ok(want) => verdict_outcome(&text, m, team_value(x), got, want, "relativized vs submodel"),
                            Err(EvalError::BudgetExhausted(_)) => Outcome::Exhausted,
                            Err(err) => verdict_outcome(&text, m, team_value(x), Err(err), true, "submodel"),
                        }
                    })
                    .collect()
            })
        });
        parts.push((e.text.to_string(), part));
    }
    merge_all("relativization", parts)
}

#[derive(Clone, Debug)]
pub struct MutationResult {
    pub mutation: Mutation,
    pub detected: bool,
    /// The first corpus entry exposing the mutation.
    pub witness: Option<Failure>,
}

/// Runs the forward suite against each mutated translation until a
/// mismatch exposes it.
pub fn run_mutation_suite(space: &CaseSpace) -> Vec<MutationResult> {
    Mutation::ALL
        .iter()
        .map(|&mutation| {
            let witness = corpus::group(Group::Forward).find_map(|e| {
                let ctx = context(e, space).with_mutation(Some(mutation));
                match forward(&e.formula(), &ctx, space, true) {
                    Ok(r) => r.failures.into_iter().next(),
                    Err(err) => Some(Failure {
                        formula: e.text.into(),
                        model: Value::Null,
                        team: json!(null),
                        detail: format!("translation failed: {err}"),
                    }),
                }
            });
            MutationResult { mutation, detected: witness.is_some(), witness }
        })
        .collect()
}

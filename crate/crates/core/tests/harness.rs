use std::collections::BTreeSet;

use teamlogic::eval::{satisfies, EvalBudget};
use teamlogic::harness::corpus::{self, Group};
use teamlogic::harness::*;
use teamlogic::structures::{Model, Team};
use teamlogic::syntax::{parse_formula, Formula, Vocabulary};
use teamlogic::translate::{Mutation, TranslationContext};

fn unary_space(n: usize, rows: usize) -> CaseSpace {
    let mut s = CaseSpace::new(n, rows, &["x"]);
    s.vocab = Vocabulary::new().with_relation("U", 1);
    s
}

fn team(vars: &[&str], rows: &[&[u8]]) -> Team {
    Team::from_rows(vars.iter().map(|v| v.to_string()).collect(), rows.iter().map(|r| r.to_vec())).unwrap()
}

fn holds(m: &Model, x: &Team, phi: &Formula) -> bool {
    satisfies(m, x, phi, &EvalBudget::default()).unwrap().value
}

#[test]
fn enumeration_counts() {
    // |M| = 1: 2 interpretations of U, teams {} and {0}; |M| = 2: 4
    // interpretations, teams {}, {0}, {1}, {0, 1}.
    let space = unary_space(2, 2);
    assert_eq!(space.size(), 2 * 2 + 4 * 4);
    let cases: Vec<(Model, Team)> = enumerate_cases(&space).collect();
    assert_eq!(cases.len(), 20);
    let distinct: BTreeSet<String> = cases
        .iter()
        .map(|(m, x)| format!("{}{}", teamlogic::structures::model_to_json(m), teamlogic::structures::team_to_json(x)))
        .collect();
    assert_eq!(distinct.len(), 20);

    let minimal: Vec<(Model, Team)> = enumerate_cases(&CaseSpace::new(1, 1, &["x", "y"])).collect();
    assert_eq!(minimal.len(), 2 * 2 * 2);
    assert!(minimal.iter().any(|(_, x)| x.is_empty()));
    assert!(minimal.iter().any(|(_, x)| x.len() == 1));
}

#[test]
fn sampling_is_seeded() {
    let mut space = CaseSpace::default();
    space.cap = 40;
    let sample = |seed| {
        let mut s = space.clone();
        s.seed = seed;
        enumerate_cases(&s)
            .map(|(m, x)| format!("{}{}", teamlogic::structures::model_to_json(&m), teamlogic::structures::team_to_json(&x)))
            .collect::<Vec<_>>()
    };
    assert_eq!(sample(7).len(), 40);
    assert_eq!(sample(7), sample(7));
    assert_ne!(sample(7), sample(8));
}

#[test]
fn weighted_case_counts() {
    let space = CaseSpace::new(2, 2, &["x", "y"]);
    let phi = corpus::entry("inc-unary").unwrap().formula();
    let r = check_equivalence_inex_eso(&phi, &TranslationContext::new(1, space.vocab.clone()), &space).unwrap();
    assert!(r.passed());
    assert_eq!(r.cases, space.size());
    assert_eq!(r.cases, enumerate_cases(&space).count() as u64);
}

#[test]
fn forward_examples_and_mutation() {
    let space = CaseSpace::default();
    let v = corpus::default_vocabulary();
    for text in ["[x] sub [y]", "[x] excl [y]"] {
        let phi = parse_formula(text, &v).unwrap();
        let r = check_equivalence_inex_eso(&phi, &TranslationContext::new(1, v.clone()), &space).unwrap();
        assert!(r.passed() && r.exhausted == 0, "{}", r.summary());
    }
    let exc = parse_formula("[x] excl [y]", &v).unwrap();
    let ctx = TranslationContext::new(1, v.clone()).with_mutation(Some(Mutation::ExcDropNegated));
    let r = check_equivalence_inex_eso(&exc, &ctx, &space).unwrap();
    assert!(!r.passed());
    assert!(r.failures.len() <= MAX_RECORDED_FAILURES);
    let f = &r.failures[0];
    assert_eq!(f.formula, "[x] excl [y]");
    assert!(f.model.get("universe").is_some(), "{}", f.model);

    let outside = parse_formula("[x] sub [u]", &v).unwrap();
    assert!(check_equivalence_inex_eso(&outside, &TranslationContext::new(1, v), &space).is_err());
}

#[test]
fn report_json() {
    let r = run_counterexample_suite();
    let value: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    let keys: BTreeSet<&str> = value.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys, BTreeSet::from(["suite", "cases", "failures", "exhausted"]));
    assert_eq!(value["suite"], "counterexamples");
    assert_eq!(value["cases"], 9);
    assert!(r.passed(), "{}", r.to_json());
}

#[test]
fn closure_properties() {
    let space = CaseSpace::default();
    let f = |name: &str| corpus::entry(name).unwrap().formula();
    assert!(check_closure(&f("exc-atom"), ClosureProperty::Downward, &space).unwrap().passed());
    assert!(check_closure(&f("inc-atom"), ClosureProperty::Union, &space).unwrap().passed());
    for p in [ClosureProperty::Flatness, ClosureProperty::Locality, ClosureProperty::EmptyTeam] {
        assert!(check_closure(&f("fo-exists"), p, &space).unwrap().passed(), "{}", p.name());
    }
    // inclusion atoms are not downward closed, exclusion atoms not union closed
    assert!(!check_closure(&f("inc-atom"), ClosureProperty::Downward, &space).unwrap().passed());
    assert!(!check_closure(&f("exc-atom"), ClosureProperty::Union, &space).unwrap().passed());
    assert!(!check_closure(&f("inc-atom"), ClosureProperty::Flatness, &space).unwrap().passed());

    let union = check_closure(&f("observation-a"), ClosureProperty::Union, &space).unwrap();
    assert!(!union.passed());
    let x1 = serde_json::from_str::<serde_json::Value>(&teamlogic::structures::team_to_json(&team(&["x", "y"], &[&[0, 1]]))).unwrap();
    let x2 = serde_json::from_str::<serde_json::Value>(&teamlogic::structures::team_to_json(&team(&["x", "y"], &[&[1, 0]]))).unwrap();
    let paper = union.failures.iter().any(|f| {
        f.model["universe"] == 3 && f.team["x1"] == x1 && f.team["x2"] == x2
            || f.model["universe"] == 3 && f.team["x1"] == x2 && f.team["x2"] == x1
    });
    let small = check_closure(&f("observation-a"), ClosureProperty::Union, &CaseSpace::new(3, 1, &["x", "y"])).unwrap();
    assert!(paper || small.failures.iter().any(|f| f.model["universe"] == 3 && f.team["x1"] == x1 && f.team["x2"] == x2));
    assert!(!check_closure(&f("observation-c"), ClosureProperty::Downward, &space).unwrap().passed());
}

#[test]
fn operators() {
    let space = CaseSpace::new(2, 2, &["x", "y"]);
    let reports = run_operator_suite(&space);
    assert_eq!(reports.len(), corpus::group(Group::Operator).count());
    for (name, r) in reports {
        assert!(r.passed() && r.cases > 0, "{name}: {}", r.summary());
    }
}

fn edges(n: usize, es: &[[u8; 2]], symmetric: bool) -> Model {
    let mut all: Vec<[u8; 2]> = es.to_vec();
    if symmetric {
        all.extend(es.iter().map(|[a, b]| [*b, *a]));
    }
    Model::new(n).unwrap().with_relation("E", 2, all).unwrap()
}

#[test]
fn graph_examples() {
    let s = |name: &str| corpus::entry(name).unwrap().formula();
    let unit = Team::unit();
    let path = edges(3, &[[0, 1], [1, 2]], true);
    assert!(!holds(&path, &unit, &s("disconnected")));
    assert!(holds(&path, &unit, &s("two-colourable")));
    let split = edges(3, &[[0, 1]], true);
    assert!(holds(&split, &unit, &s("disconnected")));
    let triangle = edges(3, &[[0, 1], [1, 2], [0, 2]], true);
    assert!(!holds(&triangle, &unit, &s("two-colourable")));
    assert!(!holds(&triangle, &unit, &s("disconnected")));
    assert!(holds(&edges(3, &[[0, 1], [1, 2], [2, 0]], false), &unit, &s("cycle")));
    assert!(holds(&edges(2, &[[1, 1]], false), &unit, &s("cycle")));
    assert!(!holds(&edges(3, &[[0, 1], [1, 2], [0, 2]], false), &unit, &s("cycle")));

    let r = run_graph_suite(3, EvalBudget::default());
    assert!(r.passed() && r.exhausted == 0, "{}", r.to_json());
    // undirected graphs on 1, 2, 3 vertices, two sentences; directed graphs with loops
    assert_eq!(r.cases, (1 + 2 + 8) * 2 + (2 + 16 + 512));
}

#[test]
fn infinity_examples() {
    let delta = corpus::entry("delta-inf").unwrap().formula();
    assert!(!holds(&Model::new(1).unwrap(), &Team::unit(), &delta));
    let rel = Formula::Relativized { body: Box::new(delta), var: "y".into() };
    let x = team(&["x", "y"], &[&[0, 0], &[0, 1]]);
    assert!(!holds(&Model::new(3).unwrap(), &x, &rel));

    let r = run_infinity_suite(&CaseSpace::new(2, 2, &["x", "y"]));
    assert!(r.passed() && r.exhausted == 0, "{}", r.to_json());
}

#[test]
fn relativization_examples() {
    let phi = corpus::entry("rel-total").unwrap().formula();
    let rel = Formula::Relativized { body: Box::new(phi.clone()), var: "y".into() };
    let full = team(&["x", "y"], &[&[0, 0], &[0, 1], &[0, 2]]);
    for m in [edges(3, &[[0, 1], [1, 2], [2, 0]], false), edges(3, &[[0, 1], [1, 2]], false)] {
        assert_eq!(holds(&m, &full, &rel), holds(&m, &Team::unit(), &phi));
    }
    // X(y) = {0, 1}: the edge 1 -> 2 leaves the submodel
    let m = edges(3, &[[0, 1], [1, 2]], false);
    assert!(!holds(&m, &team(&["x", "y"], &[&[2, 0], &[2, 1]]), &rel));
    let m = edges(3, &[[0, 1], [1, 0]], false);
    assert!(holds(&m, &team(&["x", "y"], &[&[2, 0], &[2, 1]]), &rel));
    // X(y) = {2}: a single vertex without a loop
    assert!(!holds(&m, &team(&["x", "y"], &[&[0, 2]]), &rel));

    let r = run_relativization_suite(&CaseSpace::new(2, 2, &["x", "y"]));
    assert!(r.passed() && r.cases > 0, "{}", r.to_json());
}

#[test]
fn small_suites_are_deterministic() {
    let space = CaseSpace::new(2, 2, &["x", "y"]);
    for run in [run_forward_suite, run_backward_suite, run_normal_form_suite, run_closure_suite] {
        let (a, b) = (run(&space), run(&space));
        assert!(a.passed(), "{}", a.to_json());
        assert_eq!(a, b);
    }
}

#[test]
fn corpus_is_well_formed() {
    let names: BTreeSet<&str> = corpus::corpus().iter().map(|e| e.name).collect();
    assert_eq!(names.len(), corpus::corpus().len());
    for e in corpus::corpus() {
        if e.eso {
            e.eso_formula();
        } else {
            e.formula();
        }
        assert!(e.arity() >= 1);
    }
    assert!(corpus::group(Group::Forward).count() >= 15);
    assert!(corpus::group(Group::Backward).count() >= 10);
}

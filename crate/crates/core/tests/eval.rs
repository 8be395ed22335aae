mod common;

use proptest::prelude::*;
use teamlogic::eval::{Strategy as Engine, *};
use teamlogic::structures::{restrict, Assignment, Model, Team};
use teamlogic::syntax::{desugar, free_variables, parse_formula, Formula, Vocabulary};

fn xy_team(rows: &[[u8; 2]]) -> Team {
    Team::from_rows(vec!["x".into(), "y".into()], rows.iter().map(|r| r.to_vec())).unwrap()
}

fn check(m: &Model, x: &Team, text: &str, strategy: Engine) -> bool {
    let phi = parse_formula(text, &m.vocabulary()).unwrap();
    satisfies(m, x, &phi, &EvalBudget::default().strategy(strategy)).unwrap().value
}

const STRATEGIES: [Engine; 4] = [Engine::Search(Gates::NONE), Engine::Search(Gates::ALL), Engine::Sat, Engine::Auto];

#[test]
fn quantifier_closure_observation() {
    let m = Model::new(3).unwrap();
    let (x1, x2) = (xy_team(&[[0, 1]]), xy_team(&[[1, 0]]));
    let both = x1.union(&x2).unwrap();
    for s in STRATEGIES {
        let phi = "(forall [z] sub [x]) y != z";
        assert_eq!([check(&m, &x1, phi, s), check(&m, &x2, phi, s), check(&m, &both, phi, s)], [true, true, false]);
        let psi = "(forall [z] excl [x]) [y] sub [z]";
        assert_eq!([check(&m, &x1, psi, s), check(&m, &x2, psi, s), check(&m, &both, psi, s)], [true, true, false]);
        let theta = "(forall [z] excl [x]) y != z";
        assert_eq!([check(&m, &x1, theta, s), check(&m, &x2, theta, s), check(&m, &both, theta, s)], [false, false, true]);
    }
}

#[test]
fn full_relation_example() {
    let m = Model::new(2).unwrap();
    let t = |rows: &[u8]| Team::from_rows(vec!["t".into()], rows.iter().map(|&a| vec![a])).unwrap();
    for s in STRATEGIES {
        assert!(check(&m, &t(&[0, 1]), "forall x. [x] sub [t]", s));
        assert!(!check(&m, &t(&[0]), "forall x. [x] sub [t]", s));
    }
}

#[test]
fn empty_team_and_unit_team() {
    let m = Model::new(2).unwrap().with_relation("U", 1, [[1u8]]).unwrap();
    let empty = Team::new(vec!["x".into()]).unwrap();
    for s in STRATEGIES {
        assert!(check(&m, &empty, "x != x", s));
        assert!(check(&m, &Team::unit(), "exists x. U(x)", s));
        assert!(!check(&m, &Team::unit(), "forall x. U(x)", s));
    }
}

#[test]
fn errors() {
    let m = Model::new(2).unwrap();
    let v = Vocabulary::new();
    let x = xy_team(&[[0, 1]]);
    let phi = parse_formula("x = u", &v).unwrap();
    assert_eq!(satisfies(&m, &x, &phi, &EvalBudget::default()), Err(EvalError::UnboundVariable("u".into())));
    let dep = parse_formula("dep(x)", &v).unwrap();
    let core_only = EvalBudget::default().mode(EvalMode::CoreOnly);
    assert_eq!(satisfies(&m, &x, &dep, &core_only), Err(EvalError::NotCore));
    let rel = parse_formula("U(x)", &Vocabulary::new().with_relation("U", 1)).unwrap();
    assert!(matches!(satisfies(&m, &x, &rel, &EvalBudget::default()), Err(EvalError::UnknownSymbol(_))));
    // a search that cannot finish within two nodes
    let hard = parse_formula("exists z. exists w. [z] sub [x] and [w] excl [y]", &v).unwrap();
    let tiny = EvalBudget::with_nodes(2).strategy(Engine::Search(Gates::NONE));
    assert_eq!(satisfies(&m, &xy_team(&[[0, 1], [1, 0]]), &hard, &tiny), Err(EvalError::BudgetExhausted(2)));
}

#[test]
fn singleton_and_sentences() {
    let m = Model::new(3).unwrap().with_relation("E", 2, [[0u8, 1], [1, 2]]).unwrap();
    let v = m.vocabulary();
    let s: Assignment = [("x".to_string(), 0u8)].into_iter().collect();
    assert!(satisfies_singleton(&m, &s, &parse_formula("x = x", &v).unwrap()).unwrap());
    assert!(satisfies_singleton(&m, &s, &parse_formula("exists y. E(x, y)", &v).unwrap()).unwrap());
    assert!(!satisfies_singleton(&m, &s, &parse_formula("forall y. E(x, y)", &v).unwrap()).unwrap());
    let sentence = parse_formula("exists x. exists y. E(x, y) and exists z. E(y, z)", &v).unwrap();
    let s0 = Assignment::new();
    assert_eq!(
        satisfies_singleton(&m, &s0, &sentence).unwrap(),
        satisfies(&m, &Team::unit(), &sentence, &EvalBudget::default()).unwrap().value
    );
    assert_eq!(
        satisfies_singleton(&m, &s, &parse_formula("[x] sub [x]", &v).unwrap()),
        Err(EvalError::NotFirstOrder)
    );
}

#[test]
fn negated_atoms() {
    let m = Model::new(3).unwrap();
    let v = Vocabulary::new();
    let inc = parse_formula("[x] sub [y]", &v).unwrap();
    let exc = parse_formula("[x] excl [y]", &v).unwrap();
    let disjoint = xy_team(&[[0, 1], [0, 2]]);
    assert!(check_negated_atom(&m, &disjoint, &inc, false).unwrap());
    let equal = xy_team(&[[0, 1], [1, 0]]);
    assert!(check_negated_atom(&m, &equal, &exc, false).unwrap());
    assert!(!check_negated_atom(&m, &equal, &exc, true).unwrap());
    let swapped = parse_formula("[y] excl [x]", &v).unwrap();
    for rows in [[[0u8, 1], [1, 1]], [[0, 0], [2, 1]], [[1, 0], [0, 1]]] {
        let x = xy_team(&rows);
        assert_eq!(
            check_negated_atom(&m, &x, &exc, false).unwrap(),
            check_negated_atom(&m, &x, &swapped, false).unwrap()
        );
    }
}

fn value(m: &Model, x: &Team, phi: &Formula, b: EvalBudget) -> bool {
    satisfies(m, x, phi, &b).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn engines_agree_on_core((m, x) in common::case(3, 3), phi in common::core_formula(3)) {
        let reference = value(&m, &x, &phi, EvalBudget::default().strategy(Engine::Sat));
        let bounded = EvalBudget::with_nodes(20_000);
        for gates in [Gates::NONE, Gates::ALL] {
            match satisfies(&m, &x, &phi, &bounded.strategy(Engine::Search(gates))) {
                Ok(out) => prop_assert_eq!(out.value, reference, "gates {:?}", gates),
                Err(e) => prop_assert_eq!(e, EvalError::BudgetExhausted(20_000)),
            }
        }
    }

    #[test]
    fn engines_agree_on_sugar((m, x) in common::case(2, 3), phi in common::sugar_formula(2)) {
        let sat = value(&m, &x, &phi, EvalBudget::default().strategy(Engine::Sat));
        if let Ok(gated) = satisfies(&m, &x, &phi, &EvalBudget::with_nodes(20_000).strategy(Engine::Search(Gates::ALL))) {
            prop_assert_eq!(gated.value, sat);
        }
        let core = desugar(&phi).unwrap();
        let expanded = value(&m, &x, &core, EvalBudget::default().strategy(Engine::Sat).mode(EvalMode::CoreOnly));
        prop_assert_eq!(expanded, sat, "desugared: {}", core);
    }

    #[test]
    fn locality_and_flatness((m, x) in common::case(3, 3), phi in common::core_formula(3)) {
        let b = EvalBudget::default();
        let v = value(&m, &x, &phi, b);
        let restricted = restrict(&x, &free_variables(&phi)).unwrap();
        prop_assert_eq!(value(&m, &restricted, &phi, b), v);
        if phi.is_first_order() {
            let flat = x.assignments().all(|s| satisfies_singleton(&m, &s, &phi).unwrap());
            prop_assert_eq!(flat, v);
        }
    }

    #[test]
    fn budget_monotone((m, x) in common::case(2, 3), phi in common::core_formula(3), small in 1u64..200) {
        let b = EvalBudget::with_nodes(small).strategy(Engine::Search(Gates::NONE));
        if let Ok(out) = satisfies(&m, &x, &phi, &b) {
            prop_assert!(out.nodes_used <= small);
            prop_assert_eq!(out.value, value(&m, &x, &phi, EvalBudget::default()));
        }
    }
}

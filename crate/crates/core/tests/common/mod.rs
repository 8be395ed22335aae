#![allow(dead_code)]

use proptest::prelude::*;
use teamlogic::structures::{Model, Team};
use teamlogic::syntax::{validate, Formula, Restriction, Term};

pub const VARS: [&str; 4] = ["x", "y", "z", "w"];

pub fn domain() -> Vec<String> {
    VARS.iter().map(|v| v.to_string()).collect()
}

fn var() -> impl Strategy<Value = Term> {
    prop::sample::select(VARS.to_vec()).prop_map(Term::var)
}

fn bound_var() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["z", "w"]).prop_map(String::from)
}

fn pair() -> impl Strategy<Value = (Vec<Term>, Vec<Term>)> {
    (1usize..=2).prop_flat_map(|k| (prop::collection::vec(var(), k), prop::collection::vec(var(), k)))
}

pub fn literal() -> impl Strategy<Value = Formula> {
    prop_oneof![
        (var(), var()).prop_map(|(a, b)| Formula::Eq(a, b)),
        (var(), var()).prop_map(|(a, b)| Formula::NotEq(a, b)),
        var().prop_map(|a| Formula::Rel("U".into(), vec![a])),
        var().prop_map(|a| Formula::NotRel("U".into(), vec![a])),
        (var(), var()).prop_map(|(a, b)| Formula::Rel("E".into(), vec![a, b])),
        (var(), var()).prop_map(|(a, b)| Formula::NotRel("E".into(), vec![a, b])),
    ]
}

pub fn atom() -> impl Strategy<Value = Formula> {
    prop_oneof![
        3 => literal(),
        1 => pair().prop_map(|(a, b)| Formula::Inc(a, b)),
        1 => pair().prop_map(|(a, b)| Formula::Exc(a, b)),
    ]
}

/// Core formulas: literals, inclusion and exclusion atoms, connectives and
/// quantifiers over `z` and `w`.
pub fn core_formula(depth: u32) -> impl Strategy<Value = Formula> {
    atom().prop_recursive(depth, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (bound_var(), inner.clone()).prop_map(|(x, b)| Formula::Exists(x, Box::new(b))),
            (bound_var(), inner).prop_map(|(x, b)| Formula::Forall(x, Box::new(b))),
        ]
    })
}

/// Formulas with every derived operator except relativization.
pub fn sugar_formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => atom(),
        1 => var().prop_map(Formula::Dep),
        1 => pair().prop_map(|(a, b)| Formula::EquiExt(a, b)),
    ];
    leaf.prop_recursive(depth, 10, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::ior(a, b)),
            (bound_var(), inner.clone()).prop_map(|(x, b)| Formula::Exists(x, Box::new(b))),
            (bound_var(), inner.clone()).prop_map(|(x, b)| Formula::Forall(x, Box::new(b))),
            (var(), bound_var(), inner.clone()).prop_map(|(t, u, b)| Formula::Store {
                from: vec![t],
                to: vec![u],
                body: Box::new(b)
            }),
            (prop::sample::select(Restriction::ALL.to_vec()), bound_var(), var(), inner.clone())
                .prop_map(|(k, x, t, b)| Formula::restricted(k, vec![x], vec![t], b)),
            (inner.clone(), inner, var()).prop_map(|(a, b, t)| Formula::tvp(a, b, vec![vec![t]])),
        ]
    })
    .prop_filter("well-formed", |phi| validate(phi).is_ok())
}

pub fn model(max: usize) -> impl Strategy<Value = Model> {
    (1..=max).prop_flat_map(|n| {
        (Just(n), prop::collection::vec(any::<bool>(), n), prop::collection::vec(any::<bool>(), n * n))
    })
    .prop_map(|(n, u, e)| {
        let us: Vec<Vec<u8>> = (0..n).filter(|&i| u[i]).map(|i| vec![i as u8]).collect();
        let es: Vec<Vec<u8>> =
            (0..n * n).filter(|&i| e[i]).map(|i| vec![(i / n) as u8, (i % n) as u8]).collect();
        Model::new(n).unwrap().with_relation("U", 1, us).unwrap().with_relation("E", 2, es).unwrap()
    })
}

pub fn team(n: usize, max_rows: usize) -> impl Strategy<Value = Team> {
    prop::collection::vec(prop::collection::vec(0..n as u8, VARS.len()), 0..=max_rows)
        .prop_map(|rows| Team::from_rows(domain(), rows).unwrap())
}

pub fn case(max_n: usize, max_rows: usize) -> impl Strategy<Value = (Model, Team)> {
    model(max_n).prop_flat_map(move |m| {
        let n = m.size();
        (Just(m), team(n, max_rows))
    })
}

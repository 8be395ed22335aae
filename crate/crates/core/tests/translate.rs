mod common;

use proptest::prelude::*;
use teamlogic::eso::{eso_satisfies, RelAssignment};
use teamlogic::eval::{satisfies, EvalBudget};
use teamlogic::structures::{team_values, Model, Relation, Team};
use teamlogic::syntax::*;
use teamlogic::translate::*;

fn vocab() -> Vocabulary {
    Vocabulary::new().with_relation("U", 1).with_relation("E", 2)
}

fn formula(text: &str) -> Formula {
    parse_formula(text, &vocab()).unwrap()
}

fn eso(text: &str) -> EsoFormula {
    parse_eso(text, &vocab()).unwrap()
}

fn ctx(k: usize) -> TranslationContext {
    TranslationContext::new(k, vocab())
}

#[test]
fn inclusion_example() {
    let out = inc_to_eso(&formula("[x] sub [y]"), &ctx(1).with_free(&["x", "y"])).unwrap();
    let expected = eso(
        "EX P1:1 . (forall x. forall y. !R(x, y) or (R(x, y) and P1(x))) \
         and (forall u. !P1(u) or (exists x. exists y. R(x, y) and (u = y and P1(x))))",
    );
    assert_eq!(out, expected);
    assert_eq!(inex_to_eso(&formula("[x] sub [y]"), &ctx(1).with_free(&["x", "y"])).unwrap(), expected);
}

#[test]
fn exclusion_example() {
    let out = exc_to_eso(&formula("[x] excl [y]"), &ctx(1).with_free(&["x", "y"])).unwrap();
    let expected = eso("EX P1:1 . forall x. forall y. !R(x, y) or (R(x, y) and (P1(x) and !P1(y)))");
    assert_eq!(out, expected);
}

#[test]
fn literal_only_and_sentences() {
    let phi = formula("U(x) or x = y");
    let out = exc_to_eso(&phi, &ctx(1)).unwrap();
    assert!(out.quantified.is_empty());
    assert_eq!(out, eso("forall x. forall y. !R(x, y) or (R(x, y) and (U(x) or x = y))"));
    assert_eq!(inc_to_eso(&phi, &ctx(1)).unwrap(), out);

    let sentence = formula("exists x. [x] excl [x]");
    assert_eq!(exc_to_eso(&sentence, &ctx(1)).unwrap(), eso("EX P1:1 . exists x. P1(x) and !P1(x)"));
    let sentence = formula("forall x. [x] sub [x]");
    let out = inc_to_eso(&sentence, &ctx(1)).unwrap();
    assert!(out.free_relvars.is_empty());
    assert_eq!(
        out,
        eso("EX P1:1 . (forall x. P1(x)) and (forall u. !P1(u) or ((exists x. u = x and P1(x)) and (forall x. P1(x))))")
    );
}

#[test]
fn mixed_numbering() {
    let out = inex_to_eso(&formula("[x] sub [y] and [x] excl [z]"), &ctx(1)).unwrap();
    let names: Vec<&str> = out.quantified.iter().map(|(p, _)| p.as_str()).collect();
    assert_eq!(names, ["P2", "P1"]);
    assert_eq!(out.free_relvars.iter().next().unwrap(), &("R".to_string(), 3));
}

#[test]
fn translation_errors() {
    assert!(matches!(exc_to_eso(&formula("[x] sub [y]"), &ctx(1)), Err(TranslateError::Fragment(_))));
    assert!(matches!(inc_to_eso(&formula("[x] excl [y]"), &ctx(1)), Err(TranslateError::Fragment(_))));
    assert_eq!(
        inex_to_eso(&formula("[x, y] sub [y, x]"), &ctx(1)),
        Err(TranslateError::ArityExceeds { arity: 2, k: 1 })
    );
    assert!(matches!(inex_to_eso(&formula("[x] sub [y]"), &ctx(1).with_free(&["x"])), Err(TranslateError::Fragment(_))));
    let mut clash = ctx(1);
    clash.relvar = "U".into();
    assert!(matches!(inex_to_eso(&formula("[x] sub [y]"), &clash), Err(TranslateError::Clash(_))));
    assert_eq!(
        eso_to_inex(&eso("EX P:2 . forall x. P(x, x)"), &ctx(1)),
        Err(TranslateError::ArityExceeds { arity: 2, k: 1 })
    );
    let bad = ctx(1).with_binding("R", &["x"]);
    assert!(matches!(eso_to_inex(&eso("forall x. R(x)"), &bad), Err(TranslateError::Clash(_))));
}

#[test]
fn relvar_names_avoid_vocabulary() {
    let v = vocab().with_relation("P1", 1);
    let phi = parse_formula("[x] sub [y] and P1(x)", &v).unwrap();
    let out = inc_to_eso(&phi, &TranslationContext::new(1, v)).unwrap();
    assert_eq!(out.quantified, vec![("Q1".to_string(), 1)]);
}

#[test]
fn backward_example() {
    let phi = eso("EX P:1 . forall x. P(x) or !R(x)");
    let out = eso_to_inex(&phi, &ctx(1)).unwrap();
    let expected = formula(
        "exists w1. (forall x. [x] sub [w1] orp{[w1];[y1]} [x] excl [y1]) \
         orp{[w1];[y1]} (forall x. x != x orp{[w1];[y1]} [x] excl [y1])",
    );
    assert_eq!(out, expected);
    assert_eq!(free_variables(&out), ["y1".to_string()].into());
    assert_eq!(arity_profile(&out).unwrap().max_arity(), 1);

    let sentence = eso_to_inex(&eso("EX P:1 . exists x. P(x)"), &ctx(1)).unwrap();
    assert!(is_sentence(&sentence));
    let first_order = eso_to_inex(&eso("forall x. U(x) or x = x"), &ctx(1)).unwrap();
    assert_eq!(first_order, formula("forall x. U(x) or x = x"));
}

#[test]
fn backward_padding() {
    let out = eso_to_inex(&eso("EX P:1 . forall x. P(x) or R(x)"), &ctx(2).with_binding("R", &["v"])).unwrap();
    let text = pretty_print(&out);
    assert!(text.starts_with("exists w11. exists w12. "), "{text}");
    assert!(text.contains("[x, x] sub [v, v]"), "{text}");
    assert_eq!(free_variables(&out), ["v".to_string()].into());
}

fn bind(m: &Model, x: &Team, relvar: &str, ys: &[String]) -> RelAssignment {
    let values = team_values(m, x, &var_tuple(ys)).unwrap();
    [(relvar.to_string(), Relation::from_tuples(m.size(), ys.len(), values).unwrap())].into()
}

fn dependency_atoms(phi: &Formula) -> usize {
    let mut n = 0;
    phi.walk(&mut |f| n += matches!(f, Formula::Inc(..) | Formula::Exc(..)) as usize);
    n
}

/// Unary relation variable `P`, free unary `R`, binary `E`, over `x`, `y`.
fn eso_matrix() -> impl Strategy<Value = Formula> {
    let var = prop::sample::select(vec!["x", "y"]).prop_map(Term::var);
    let leaf = prop_oneof![
        (var.clone(), var.clone()).prop_map(|(a, b)| Formula::Eq(a, b)),
        (var.clone(), var.clone()).prop_map(|(a, b)| Formula::NotEq(a, b)),
        (prop::sample::select(vec!["P", "R", "U"]), any::<bool>(), var.clone()).prop_map(|(r, pos, a)| {
            if pos { Formula::Rel(r.into(), vec![a]) } else { Formula::NotRel(r.into(), vec![a]) }
        }),
        (any::<bool>(), var.clone(), var).prop_map(|(pos, a, b)| {
            if pos { Formula::Rel("E".into(), vec![a, b]) } else { Formula::NotRel("E".into(), vec![a, b]) }
        }),
    ];
    leaf.prop_recursive(3, 8, 2, |inner| {
        let x = prop::sample::select(vec!["x", "y"]);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (x.clone(), inner.clone()).prop_map(|(x, b)| Formula::exists(x, b)),
            (x, inner).prop_map(|(x, b)| Formula::forall(x, b)),
        ]
    })
    .prop_map(|phi| {
        let open: Vec<String> = free_variables(&phi).into_iter().collect();
        Formula::forall_all(&open, phi)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn forward_equivalence(
        phi in common::core_formula(3).prop_filter("few atoms", |f| (1..=2).contains(&dependency_atoms(f))),
        (m, x) in common::case(2, 3),
    ) {
        let k = 2;
        let out = inex_to_eso(&phi, &ctx(k)).unwrap();
        let ys: Vec<String> = free_variables(&phi).into_iter().collect();
        prop_assume!(!ys.is_empty() || !x.is_empty());
        let free = if ys.is_empty() { RelAssignment::new() } else { bind(&m, &x, "R", &ys) };
        let team = satisfies(&m, &x, &phi, &EvalBudget::default()).unwrap().value;
        let eso_value = eso_satisfies(&m, &out, &free, &EvalBudget::default()).unwrap().value;
        prop_assert_eq!(team, eso_value, "{} vs {}", pretty_print(&phi), pretty_print_eso(&out));
        prop_assert!(out.quantified.iter().all(|(_, a)| *a == k));
    }

    #[test]
    fn backward_equivalence(matrix in eso_matrix(), m in common::model(2), rows in prop::collection::btree_set(0u8..2, 1..=2)) {
        let phi = EsoFormula::new(vec![("P".into(), 1)], matrix, &vocab()).unwrap();
        prop_assume!(rows.iter().all(|&a| (a as usize) < m.size()));
        let ys = vec!["y1".to_string()];
        let x = Team::from_rows(ys.clone(), rows.iter().map(|&a| vec![a])).unwrap();
        let mut free = RelAssignment::new();
        for (r, _) in &phi.free_relvars {
            free.extend(bind(&m, &x, r, &ys));
        }
        let out = eso_to_inex(&phi, &ctx(1)).unwrap();
        let expected = eso_satisfies(&m, &phi, &free, &EvalBudget::default()).unwrap().value;
        let team = satisfies(&m, &x, &out, &EvalBudget::default()).unwrap().value;
        prop_assert_eq!(team, expected, "{}", pretty_print_eso(&phi));
    }
}

mod common;

use proptest::prelude::*;
use teamlogic::eso::*;
use teamlogic::eval::{satisfies_singleton, EvalBudget, EvalError};
use teamlogic::structures::{Assignment, Model, Relation};
use teamlogic::syntax::*;
use teamlogic::translate::eso_nonempty_normal_form;

fn vocab() -> Vocabulary {
    Vocabulary::new().with_relation("U", 1).with_relation("E", 2)
}

fn budget() -> EvalBudget {
    EvalBudget::default()
}

fn eso(text: &str) -> EsoFormula {
    parse_eso(text, &vocab()).unwrap()
}

fn model(n: usize) -> Model {
    let none: [Vec<u8>; 0] = [];
    Model::new(n)
        .and_then(|m| m.with_relation("U", 1, none.clone()))
        .and_then(|m| m.with_relation("E", 2, none))
        .unwrap()
}

#[test]
fn examples() {
    let none = RelAssignment::new();
    let all = eso("EX P:1 . forall x. P(x)");
    assert!(eso_satisfies(&model(2), &all, &none, &budget()).unwrap().value);
    let split = eso("EX P:1 . (exists x. P(x)) and (exists x. !P(x))");
    assert!(!eso_satisfies(&model(1), &split, &none, &budget()).unwrap().value);
    assert!(eso_satisfies(&model(2), &split, &none, &budget()).unwrap().value);

    let free = eso("forall x. R(x)");
    for n in 1..=3 {
        let full: RelAssignment = [("R".to_string(), Relation::full(n, 1))].into();
        let empty: RelAssignment = [("R".to_string(), Relation::empty(n, 1))].into();
        assert!(eso_satisfies(&model(n), &free, &full, &budget()).unwrap().value);
        assert!(!eso_satisfies(&model(n), &free, &empty, &budget()).unwrap().value);
    }
}

#[test]
fn errors() {
    let none = RelAssignment::new();
    let free = eso("forall x. R(x)");
    assert!(matches!(eso_satisfies(&model(2), &free, &none, &budget()), Err(EvalError::Invalid(_))));
    let open = eso("EX P:1 . P(x)");
    assert!(matches!(eso_satisfies(&model(2), &open, &none, &budget()), Err(EvalError::UnboundVariable(_))));
    let split = eso("EX P:1 . (exists x. P(x)) and (exists x. !P(x))");
    let tight = EvalBudget::with_nodes(1);
    assert_eq!(eso_satisfies(&model(3), &split, &none, &tight), Err(EvalError::BudgetExhausted(1)));
    assert_eq!(eso_satisfies(&model(3), &split, &none, &EvalBudget::with_nodes(2)).unwrap().nodes_used, 2);
    let wrong: RelAssignment = [("R".to_string(), Relation::full(2, 2))].into();
    assert!(eso_satisfies(&model(2), &free, &wrong, &budget()).is_err());
}

#[test]
fn enumeration_order() {
    let none = RelAssignment::new();
    // The least mask with bit 1 set and bit 0 clear, then Q from 1 upwards.
    let phi = eso("EX P:1 . EX Q:1 . exists x. exists y. P(x) and !P(y) and Q(x)");
    let m = model(2);
    let w = nonempty_witness_search(&m, &phi, &none, &budget()).unwrap().unwrap();
    assert_eq!(w["P"], Relation::from_tuples(2, 1, [vec![0]]).unwrap());
    assert_eq!(w["Q"], Relation::from_tuples(2, 1, [vec![0]]).unwrap());
    for _ in 0..3 {
        assert_eq!(nonempty_witness_search(&m, &phi, &none, &budget()).unwrap().unwrap(), w);
    }
    let unsat = eso("EX P:1 . forall x. P(x) and !P(x)");
    assert_eq!(nonempty_witness_search(&m, &unsat, &none, &budget()).unwrap(), None);
}

#[test]
fn normal_form_example() {
    let phi = eso("EX P:1 . forall x. P(x)");
    let delta = eso_nonempty_normal_form(&phi);
    assert_eq!(pretty_print(&delta.matrix), "(forall x. P(x)) or (forall x. x != x)");
    let m = model(3);
    let w = nonempty_witness_search(&m, &delta, &RelAssignment::new(), &budget()).unwrap().unwrap();
    assert_eq!(w["P"], Relation::full(3, 1));
    let first_order = eso("forall x. U(x)");
    assert_eq!(eso_nonempty_normal_form(&first_order), first_order);
}

/// A second-order sentence over one unary relation variable, built from a
/// random first-order formula over `x`, `y` with `U` renamed to `P`.
fn sentence() -> impl Strategy<Value = EsoFormula> {
    common::core_formula(3).prop_filter_map("first-order", |phi| {
        if !phi.is_first_order() {
            return None;
        }
        let text = pretty_print(&phi).replace("U(", "P(");
        let matrix = format!("forall x. exists y. {text}");
        let closed = parse_formula(&matrix, &Vocabulary::new().with_relation("P", 1).with_relation("E", 2)).ok()?;
        if !free_variables(&closed).is_empty() {
            return None;
        }
        EsoFormula::new(vec![("P".into(), 1)], closed, &vocab()).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tarski_matches_singleton_teams(phi in common::core_formula(3), m in common::model(3), a in 0u8..3, b in 0u8..3) {
        prop_assume!(phi.is_first_order());
        let n = m.size() as u8;
        let s: Assignment = [("x".to_string(), a % n), ("y".to_string(), b % n), ("z".to_string(), 0), ("w".to_string(), 0)].into();
        let closed = Formula::exists_all(&["x".into(), "y".into(), "z".into(), "w".into()],
            Formula::and(conj(s.iter().map(|(v, e)| Formula::Rel(format!("C{e}"), vec![Term::var(v)])).collect()), phi.clone()));
        let eso_phi = EsoFormula::new(vec![], closed, &vocab()).unwrap();
        let mut free = RelAssignment::new();
        for e in 0..3u8 {
            free.insert(format!("C{e}"), Relation::from_tuples(m.size(), 1, (e < n).then(|| vec![e])).unwrap());
        }
        let tarski = eso_satisfies(&m, &eso_phi, &free, &budget()).unwrap().value;
        prop_assert_eq!(tarski, satisfies_singleton(&m, &s, &phi).unwrap());
    }

    #[test]
    fn nonempty_lemma(phi in sentence(), m in common::model(2)) {
        let none = RelAssignment::new();
        let direct = eso_satisfies(&m, &phi, &none, &budget()).unwrap().value;
        let delta = eso_nonempty_normal_form(&phi);
        let witness = nonempty_witness_search(&m, &delta, &none, &budget()).unwrap();
        prop_assert_eq!(direct, witness.is_some());
        if let Some(w) = witness {
            prop_assert!(w.values().all(|r| !r.is_empty()));
            let fixed = EsoFormula { quantified: vec![], matrix: delta.matrix.clone(), free_relvars: [("P".to_string(), 1)].into() };
            prop_assert!(eso_satisfies(&m, &fixed, &w, &budget()).unwrap().value);
        }
    }
}

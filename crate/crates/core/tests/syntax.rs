use teamlogic::syntax::*;

fn vocab() -> Vocabulary {
    Vocabulary::new().with_relation("U", 1).with_relation("E", 2).with_function("f", 1).with_constant("c")
}

#[test]
fn round_trip() {
    let v = vocab();
    for text in [
        "x = y",
        "exists z. [x, z] sub [y, y] and !U(z)",
        "forall z. z = x or E(z, y)",
        "(forall [z] sub [x]) y != z",
        "(exists [z, w] excl [x, y]) E(z, w)",
        "(forall [z] sube [x]) z != y",
        "dep(f(x)) ior U(c)",
        "store [f(x)] -> [u] . [u] eqext [y]",
        "U(x) orp{[x];[x, y]} E(x, y)",
        "rel y (exists x. U(x))",
        "(x = y or U(x)) and (exists z. z = x)",
        "x = y or (U(x) or U(y))",
    ] {
        let phi = parse_formula(text, &v).unwrap();
        assert_eq!(pretty_print(&phi), text);
        assert_eq!(parse_formula(&pretty_print(&phi), &v).unwrap(), phi);
    }
}

#[test]
fn rejections() {
    let v = vocab();
    for text in [
        "[x] sub [y, z]",
        "V(x)",
        "!(x = y)",
        "(forall [z] sube [x]) [z] sub [y]",
        "store [x] -> [x] . x = y",
        "rel y (exists y. U(y))",
        "$1 = x",
        "U(x, y)",
        "exists U. U(x)",
    ] {
        assert!(parse_formula(text, &v).is_err(), "{text} should be rejected");
    }
    let opts = ParseOptions { allow_reserved: true };
    assert!(parse_formula_with("$1 = x", &v, opts).is_ok());
}

#[test]
fn eso_parsing() {
    let v = vocab();
    let phi = parse_eso("EX P:1 . EX Q:2 . forall x. (P(x) or !Q(x, y)) and R(x)", &v).unwrap();
    assert_eq!(phi.quantified, vec![("P".to_string(), 1), ("Q".to_string(), 2)]);
    assert_eq!(phi.free_relvars.iter().cloned().collect::<Vec<_>>(), vec![("R".to_string(), 1)]);
    assert_eq!(parse_eso(&pretty_print_eso(&phi), &v).unwrap(), phi);
    assert!(parse_eso("EX U:1 . U(x)", &v).is_err());
    assert!(parse_eso("EX P:1 . P(x, y)", &v).is_err());
    assert!(parse_eso("EX P:1 . [x] sub [y]", &v).is_err());
    assert!(parse_eso("R(x) and R(x, y)", &v).is_err());
}

#[test]
fn free_vars_and_profiles() {
    let v = vocab();
    let phi = parse_formula("exists z. [x, z] sub [y, y] and (forall [w] excl [x]) w = u", &v).unwrap();
    let fr: Vec<String> = free_variables(&phi).into_iter().collect();
    assert_eq!(fr, vec!["u", "x", "y"]);
    assert_eq!(raw_arity_profile(&phi).fragment(), Fragment::Inc(2));
    assert_eq!(arity_profile(&phi).unwrap().fragment(), Fragment::Inex(2));
    // the universal exclusion quantifier introduces inclusion atoms
    let psi = parse_formula("(forall [w] excl [x]) w = x", &v).unwrap();
    assert!(arity_profile(&psi).unwrap().has_inc);
    assert_eq!(free_variables(&parse_formula("rel y (exists x. U(x))", &v).unwrap()).len(), 1);
}

#[test]
fn desugared_is_core_and_fresh() {
    let v = vocab();
    let phi = parse_formula("dep(x) ior (forall [z] excl [x]) U(z)", &v).unwrap();
    let d = desugar(&phi).unwrap();
    assert!(d.is_core());
    assert_eq!(free_variables(&d), free_variables(&phi));
    let again = desugar(&d).unwrap();
    assert_eq!(again, d);
    let padded = pad_atoms_to_arity(&parse_formula("[x] sub [y]", &v).unwrap(), 3).unwrap();
    assert_eq!(pretty_print(&padded), "[x, x, x] sub [y, y, y]");
    assert!(pad_atoms_to_arity(&parse_formula("[x, y] excl [y, x]", &v).unwrap(), 1).is_err());
}

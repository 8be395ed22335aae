use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn teamlogic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teamlogic")).args(args).env_remove("TEAMLOGIC_BUDGET").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

struct Files(TempDir);

impl Files {
    fn new() -> Self {
        Files(tempfile::tempdir().unwrap())
    }

    fn put(&self, name: &str, text: &str) -> String {
        let p: PathBuf = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    }
}

#[test]
fn eval_verdicts_and_exit_codes() {
    let f = Files::new();
    let m = f.put("m.json", r#"{"universe": 3, "relations": {}}"#);
    let empty = f.put("empty.json", r#"{"domain": ["x", "y"], "rows": []}"#);
    let union = f.put("union.json", r#"{"domain": ["x", "y"], "rows": [[0, 1], [1, 0]]}"#);
    let x1 = f.put("x1.json", r#"{"domain": ["x", "y"], "rows": [[0, 1]]}"#);

    let o = teamlogic(&["eval", "--model", &m, "--team", &empty, "[x] excl [x] and x != x"]);
    assert_eq!((stdout(&o).as_str(), code(&o)), ("true\n", 0));

    let phi = "(forall [z] sub [x]) y != z";
    let o = teamlogic(&["eval", "--model", &m, "--team", &union, phi]);
    assert_eq!((stdout(&o).as_str(), code(&o)), ("false\n", 1));
    let o = teamlogic(&["eval", "--model", &m, "--team", &x1, phi]);
    assert_eq!((stdout(&o).as_str(), code(&o)), ("true\n", 0));

    let hard = "exists z. exists w. [z] sub [x] and [w] excl [y]";
    let o = teamlogic(&["--budget", "1", "eval", "--model", &m, "--team", &union, hard]);
    assert_eq!((stdout(&o).as_str(), code(&o)), ("budget-exceeded\n", 2));
    let o = Command::new(env!("CARGO_BIN_EXE_teamlogic"))
        .args(["eval", "--model", &m, "--team", &union, hard])
        .env("TEAMLOGIC_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);

    let file = f.put("phi.txt", phi);
    let o = teamlogic(&["eval", "--model", &m, "--team", &union, "--formula-file", &file]);
    assert_eq!(code(&o), 1);

    // sentences default to the team holding the empty assignment
    assert_eq!(code(&teamlogic(&["eval", "--model", &m, "exists x. forall y. x = y"])), 1);
    assert_eq!(code(&teamlogic(&["eval", "--model", &m, "forall x. exists y. x != y"])), 0);
}

#[test]
fn eval_errors() {
    let f = Files::new();
    let m = f.put("m.json", r#"{"universe": 2, "relations": {"E": [[0, 1]]}}"#);
    let t = f.put("t.json", r#"{"domain": ["x"], "rows": [[0], [0]]}"#);
    let o = teamlogic(&["eval", "--model", &m, "--team", &t, "E(x, x)"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("duplicate"));
    for bad in ["[x] sub", "x = q", "U(x)", "$0 = x"] {
        assert_eq!(code(&teamlogic(&["eval", "--model", &m, "--team", &t, bad])), 3, "{bad}");
    }
    let bad_model = f.put("bad.json", r#"{"universe": 0}"#);
    assert_eq!(code(&teamlogic(&["eval", "--model", &bad_model, "x = x"])), 3);
    assert_eq!(code(&teamlogic(&["eval", "--model", "/nonexistent", "x = x"])), 3);
    assert_eq!(code(&teamlogic(&["--budget", "0", "corpus", "list"])), 3);
    assert_eq!(code(&teamlogic(&["frobnicate"])), 3);
}

#[test]
fn translate_to_eso() {
    let o = teamlogic(&["translate", "to-eso", "[x] sub [y]", "--free", "x,y", "--arity", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "EX P1:1 . (forall x. forall y. !R(x, y) or R(x, y) and P1(x)) \
         and (forall u. !P1(u) or (exists x. exists y. R(x, y) and (u = y and P1(x))))\n"
    );
    let o = teamlogic(&["translate", "to-eso", "[x] excl [y]", "--verify"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("verified: 533448 cases, 0 mismatches\n"), "{}", stdout(&o));
    let o = teamlogic(&["translate", "to-eso", "[x, y] sub [y, x]", "--arity", "1"]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&teamlogic(&["translate", "to-eso", "[x] sub [y] and P(x)"])), 3);
}

#[test]
fn translate_to_inex() {
    let o = teamlogic(&["translate", "to-inex", "EX P:1 . forall x. (P(x) or !R(x))", "--arity", "1"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains(" sub ") && text.contains(" excl ") && text.contains("orp{"), "{text}");

    let o = teamlogic(&["translate", "to-inex", "exists x. R(x) and S(x)", "--bind", "R=a", "--bind", "S=b", "--verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].contains("[a]") && lines[0].contains("[b]"), "{}", lines[0]);
    assert!(lines[1].starts_with("verified: ") && lines[1].ends_with(" cases, 0 mismatches"));
    assert_eq!(code(&teamlogic(&["translate", "to-inex", "EX P:0 . P()"])), 3);
}

#[test]
fn suites() {
    let o = teamlogic(&["suite", "counterexamples"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains(r#"{"suite":"counterexamples","cases":9,"failures":[],"exhausted":0}"#), "{text}");

    let o = teamlogic(&["suite", "graphs", "--max-vertices", "4"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("graphs: pass (680 cases, 0 failures, 0 exhausted)"));

    assert_eq!(code(&teamlogic(&["suite", "nosuch"])), 3);
    assert_eq!(code(&teamlogic(&["suite", "graphs", "--max-vertices", "9"])), 3);

    let small = ["--max-universe", "2", "--max-rows", "2"];
    let args = |name: &'static str| [&["suite", name][..], &small[..]].concat();
    for name in ["closures", "relativization", "infinity", "equivalence"] {
        let o = teamlogic(&args(name));
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
        assert_eq!(stdout(&o), stdout(&teamlogic(&args(name))), "{name} is deterministic");
    }
    // a budget too small for any search leaves cases undecided
    let o = teamlogic(&[&["--budget", "1"][..], &args("relativization")].concat());
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    let o = teamlogic(&[&["--budget", "1"][..], &args("relativization"), &["--allow-exhaustion"]].concat());
    assert_eq!(code(&o), 0);
}

#[test]
fn desugar_and_corpus() {
    let o = teamlogic(&["desugar", "dep(x)"]);
    assert_eq!(code(&o), 0);
    let core = stdout(&o);
    assert!(!core.contains("dep") && core.contains("excl"), "{core}");
    let o = teamlogic(&["desugar", "[x] sub [y]"]);
    assert_eq!(stdout(&o), "[x] sub [y]\n");

    let o = teamlogic(&["corpus", "list"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().count() >= 60);
    let o = teamlogic(&["corpus", "show", "delta-inf"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("group: infinity"));
    assert_eq!(code(&teamlogic(&["corpus", "show", "nosuch"])), 3);
}

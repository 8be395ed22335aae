//! Built-in formulas: translation inputs, closure and operator samples,
//! and the example properties of graphs, functions and infinity.

use crate::syntax::{arity_profile, parse_eso, parse_formula, EsoFormula, Formula, Vocabulary};

/// What a corpus entry is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    /// Inclusion-exclusion formulas over `x`, `y` for the translation into ESO.
    Forward,
    /// ESO formulas with unary free relation variables `R`, `S`.
    Backward,
    FirstOrder,
    Exclusion,
    Inclusion,
    /// One instance per derived operator.
    Operator,
    /// Sentences of a relational vocabulary that avoid the variable `y`.
    Relativization,
    Graph,
    Function,
    Infinity,
    Counterexample,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::Forward => "forward",
            Group::Backward => "backward",
            Group::FirstOrder => "first-order",
            Group::Exclusion => "exclusion",
            Group::Inclusion => "inclusion",
            Group::Operator => "operator",
            Group::Relativization => "relativization",
            Group::Graph => "graph",
            Group::Function => "function",
            Group::Infinity => "infinity",
            Group::Counterexample => "counterexample",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub group: Group,
    pub text: &'static str,
    pub eso: bool,
    /// Expected behaviour, in words.
    pub note: &'static str,
}

impl Entry {
    pub fn formula(&self) -> Formula {
        assert!(!self.eso, "{} is an ESO entry", self.name);
        parse_formula(self.text, &default_vocabulary()).expect("corpus entries parse")
    }

    pub fn eso_formula(&self) -> EsoFormula {
        assert!(self.eso, "{} is not an ESO entry", self.name);
        parse_eso(self.text, &default_vocabulary()).expect("corpus entries parse")
    }

    /// The arity bound of the entry: its largest dependency atom or relation
    /// variable, and at least 1.
    pub fn arity(&self) -> usize {
        let k = if self.eso {
            self.eso_formula().max_arity()
        } else {
            arity_profile(&self.formula()).expect("corpus entries are well formed").max_arity()
        };
        k.max(1)
    }
}

/// One unary relation `U` and one binary relation `E`.
pub fn default_vocabulary() -> Vocabulary {
    Vocabulary::new().with_relation("U", 1).with_relation("E", 2)
}

const fn team(name: &'static str, group: Group, text: &'static str, note: &'static str) -> Entry {
    Entry { name, group, text, eso: false, note }
}

const fn eso(name: &'static str, text: &'static str, note: &'static str) -> Entry {
    Entry { name, group: Group::Backward, text, eso: true, note }
}

pub const PSI_1: &str = "forall v. exists z. [v, z] sub [x1, x2]";
pub const PSI_2: &str =
    "forall v. forall z1. forall z2. ([v, z1] excl [x1, x2] orp{[x1, x2]} [v, z2] excl [x1, x2]) orp{[x1, x2]} z1 = z2";
pub const PSI_INJ: &str =
    "forall v1. forall v2. forall z. ([v1, z] excl [x1, x2] orp{[x1, x2]} [v2, z] excl [x1, x2]) orp{[x1, x2]} v1 = v2";
pub const PSI_SURJ: &str = "forall z. exists v. [v, z] sub [x1, x2]";

use Group::*;

static CORPUS: &[Entry] = &[
    team("inc-unary", Forward, "[x] sub [y]", "X(x) within X(y)"),
    team("exc-unary", Forward, "[x] excl [y]", "X(x) and X(y) disjoint"),
    team("inc-binary", Forward, "[x, y] sub [y, x]", "X(xy) within its converse"),
    team("exc-binary", Forward, "[x, y] excl [y, x]", "X(xy) disjoint from its converse"),
    team("inc-repeated", Forward, "[x, x] sub [x, y]", "every x value occurs with y = x"),
    team("exc-repeated", Forward, "[x, x] excl [y, x]", "exclusion with a repeated variable"),
    team("and-or", Forward, "([x] sub [y] and U(x)) or x = y", "split into an inclusion part and a diagonal part"),
    team("exists-inc", Forward, "exists z. [z] sub [x] and !U(z)", "some value of x lies outside U"),
    team("forall-inc", Forward, "forall z. [z] sub [x] or z = y", "X(x) covers every element except possibly y values"),
    team("forall-exc", Forward, "forall z. [z] excl [x] or U(z)", "U covers every value of x"),
    team("inc-or-exc", Forward, "[x] sub [y] or [x] excl [y]", "mixed disjunction"),
    team("edge-inc", Forward, "exists z. E(x, z) and [z] sub [y]", "successors chosen among y values"),
    team("exists-inc-exc", Forward, "exists z. [z] excl [x] and [z] sub [y]", "some y value lies outside X(x)"),
    team("forall-cover", Forward, "forall z. [z] sub [x] or [z] sub [y]", "X(x) and X(y) cover the universe"),
    team("constancy", Forward, "dep(x)", "x is constant"),
    team("neq-or-inc", Forward, "x != y or [y] sub [x]", "diagonal rows have their value among x values"),
    team("exists-binary", Forward, "exists z. [x, z] sub [y, y]", "every x value is a y value"),
    team("or-forall-inc", Forward, "(forall z. [z] sub [x] or z = y) or U(x)", "universal inclusion inside a disjunct"),
    team("forall-exists-exc", Forward, "forall z. exists w. [w] excl [z] and E(z, w) or x = y", "nested quantifiers"),
    eso("cover", "EX P:1 . forall x. P(x) or !R(x)", "always true"),
    eso("not-everything", "EX P:1 . (forall x. !R(x) or P(x)) and (exists x. !P(x))", "R is not the universe"),
    eso("union-cover", "forall x. R(x) or S(x)", "R and S cover the universe"),
    eso("separate", "EX P:1 . forall x. (P(x) or R(x)) and (!P(x) or !S(x))", "R covers the complement of S"),
    eso("meets-u", "EX P:1 . exists x. P(x) and U(x) and R(x)", "R meets U"),
    eso("closed", "forall x. forall y. !R(x) or !E(x, y) or R(y)", "R closed under E-successors"),
    eso(
        "partition",
        "EX P:1 . EX Q:1 . forall x. (P(x) or Q(x)) and (!P(x) or !Q(x)) and (!R(x) or P(x)) and (!S(x) or Q(x))",
        "R and S disjoint",
    ),
    eso("common", "exists x. R(x) and S(x)", "R and S intersect"),
    eso("inside-u", "EX P:1 . forall x. (!P(x) or U(x)) and (P(x) or !R(x))", "R within U"),
    eso(
        "singleton-mark",
        "EX P:1 . exists x. P(x) and R(x) and (forall y. !P(y) or y = x)",
        "R nonempty",
    ),
    eso("successor", "forall x. exists y. !R(x) or (S(y) and E(x, y))", "every R element has an E-successor in S"),
    eso("two-colour", "EX P:1 . forall x. forall y. !E(x, y) or !R(x) or (P(x) and !P(y)) or (!P(x) and P(y))", "edges leaving R join differently coloured ends"),
    team("fo-eq", FirstOrder, "x = y", "flat"),
    team("fo-or", FirstOrder, "U(x) or E(x, y)", "flat"),
    team("fo-exists", FirstOrder, "exists z. E(x, z) and !U(z)", "flat"),
    team("fo-forall", FirstOrder, "forall z. E(z, x) or z = y", "flat"),
    team("fo-neg", FirstOrder, "!U(x) and x != y", "flat"),
    team("exc-atom", Exclusion, "[x] excl [y]", "downward closed"),
    team("exc-dep", Exclusion, "dep(x)", "downward closed"),
    team("exc-binary-or", Exclusion, "[x, y] excl [y, x] or U(x)", "downward closed"),
    team("exc-forall", Exclusion, "forall z. [z] excl [x] or z = y", "downward closed"),
    team("exc-sube", Exclusion, "(forall [z] sube [x]) z != y", "downward closed"),
    team("exc-exists", Exclusion, "exists z. [z] excl [x] and E(x, z)", "downward closed"),
    team("inc-atom", Inclusion, "[x] sub [y]", "closed under unions"),
    team("inc-or", Inclusion, "[x] sub [y] or [y] sub [x]", "closed under unions"),
    team("inc-exists", Inclusion, "exists z. [z] sub [x] and E(z, y)", "closed under unions"),
    team("inc-forall", Inclusion, "forall z. [z] sub [x] or z = y", "closed under unions"),
    team("inc-quantifier", Inclusion, "(exists [z] sub [x]) U(z)", "closed under unions"),
    team("inc-converse", Inclusion, "[x, y] sub [y, x]", "closed under unions"),
    team("op-dep", Operator, "dep(x) or U(y)", "constancy atom"),
    team("op-ior", Operator, "[x] sub [y] ior dep(y)", "intuitionistic disjunction"),
    team("op-store", Operator, "store [x, y] -> [u, v] . exists x. [x] sub [v] and x != u", "storing operator"),
    team("op-exists-sub", Operator, "(exists [z] sub [x]) z != y", "existential inclusion quantifier"),
    team("op-exists-excl", Operator, "(exists [z] excl [x]) U(z) or z = y", "existential exclusion quantifier"),
    team("op-forall-sub", Operator, "(forall [z] sub [x]) y != z", "universal inclusion quantifier"),
    team("op-forall-excl", Operator, "(forall [z] excl [x]) [y] sub [z]", "universal exclusion quantifier"),
    team("op-forall-sube", Operator, "(forall [z] sube [x]) z != y", "universal inclusion quantifier for exclusion logic"),
    team("op-tvp", Operator, "U(x) orp{[x];[y]} x = y", "term value preserving disjunction"),
    team("op-eqext", Operator, "[x] eqext [y]", "equiextension atom"),
    team("rel-total", Relativization, "forall u. exists z. E(u, z)", "every element has a successor"),
    team("rel-hub", Relativization, "exists u. U(u) and (forall z. E(u, z) or u = z)", "a U element adjacent to all others"),
    team("rel-exc", Relativization, "exists u. exists v. [u] excl [v] and E(u, v)", "an edge"),
    team("rel-symmetric", Relativization, "forall u. forall v. !E(u, v) or E(v, u)", "E symmetric"),
    team("rel-cover", Relativization, "exists u. forall v. [v] sub [u] or U(v)", "U misses at most what u covers"),
    team("rel-cycle", Relativization, "exists u. (exists [v] sub [u]) E(u, v)", "a cycle"),
    team(
        "disconnected",
        Graph,
        "exists x1. exists x2. [x1] excl [x2] and (forall z. [z] sub [x1] or [z] sub [x2]) \
         and (forall [y1] sub [x1]) (forall [y2] sub [x2]) !E(y1, y2)",
        "true iff the undirected graph is disconnected",
    ),
    team(
        "two-colourable",
        Graph,
        "(exists x1. exists x2. forall y. y = x1 or y = x2) or (exists x1. exists x2. [x1] excl [x2] \
         and [x2] excl [x1] and (forall z. [z] sub [x1] or [z] sub [x2]) \
         and ((forall [y1] sub [x1]) (forall [y2] sub [x1]) !E(y1, y2)) \
         and ((forall [y1] sub [x2]) (forall [y2] sub [x2]) !E(y1, y2)))",
        "true iff the undirected graph is 2-colourable",
    ),
    team("cycle", Graph, "exists x. (exists [y] sub [x]) E(x, y)", "true iff the directed graph has a cycle"),
    team("psi-1", Function, PSI_1, "X(x1 x2) is total"),
    team("psi-2", Function, PSI_2, "X(x1 x2) is functional"),
    team("psi-inj", Function, PSI_INJ, "X(x1 x2) is injective"),
    team("psi-surj", Function, PSI_SURJ, "X(x1 x2) is surjective"),
    team(
        "delta-inf",
        Infinity,
        "exists x1. exists x2. (forall v. exists z. [v, z] sub [x1, x2]) \
         and (forall v. forall z1. forall z2. ([v, z1] excl [x1, x2] orp{[x1, x2]} [v, z2] excl [x1, x2]) orp{[x1, x2]} z1 = z2) \
         and (forall v1. forall v2. forall z. ([v1, z] excl [x1, x2] orp{[x1, x2]} [v2, z] excl [x1, x2]) orp{[x1, x2]} v1 = v2) \
         and (exists z. forall v. [v, z] excl [x1, x2])",
        "true only on infinite models",
    ),
    team("observation-a", Counterexample, "(forall [z] sub [x]) y != z", "true, true, false on X1, X2, X1 and X2"),
    team("observation-b", Counterexample, "(forall [z] excl [x]) [y] sub [z]", "true, true, false"),
    team("observation-c", Counterexample, "(forall [z] excl [x]) y != z", "false, false, true"),
];

pub fn corpus() -> &'static [Entry] {
    CORPUS
}

pub fn entry(name: &str) -> Option<&'static Entry> {
    CORPUS.iter().find(|e| e.name == name)
}

pub fn group(g: Group) -> impl Iterator<Item = &'static Entry> {
    CORPUS.iter().filter(move |e| e.group == g)
}

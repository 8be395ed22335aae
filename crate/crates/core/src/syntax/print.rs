use std::fmt;

use super::ast::{EsoFormula, Formula, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, ts: &[Term]) -> fmt::Result {
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

struct Tuple<'a>(&'a [Term]);

impl fmt::Display for Tuple<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        write_list(f, self.0)?;
        f.write_str("]")
    }
}

/// Binding strength: disjunctions 1, conjunction 2, everything else 3.
/// Prefix operators get 0 so that they are parenthesized as operands.
fn level(phi: &Formula) -> u8 {
    match phi {
        Formula::Or(..) | Formula::IOr(..) | Formula::TvpOr { .. } => 1,
        Formula::And(..) => 2,
        Formula::Exists(..) | Formula::Forall(..) | Formula::Store { .. } | Formula::Restricted { .. } => 0,
        _ => 3,
    }
}

fn operand(f: &mut fmt::Formatter<'_>, phi: &Formula, min: u8) -> fmt::Result {
    if level(phi) < min {
        write!(f, "({phi})")
    } else {
        write!(f, "{phi}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::NotEq(a, b) => write!(f, "{a} != {b}"),
            Formula::Rel(r, ts) => {
                write!(f, "{r}(")?;
                write_list(f, ts)?;
                f.write_str(")")
            }
            Formula::NotRel(r, ts) => {
                write!(f, "!{r}(")?;
                write_list(f, ts)?;
                f.write_str(")")
            }
            Formula::Inc(a, b) => write!(f, "{} sub {}", Tuple(a), Tuple(b)),
            Formula::Exc(a, b) => write!(f, "{} excl {}", Tuple(a), Tuple(b)),
            Formula::EquiExt(a, b) => write!(f, "{} eqext {}", Tuple(a), Tuple(b)),
            Formula::And(a, b) => {
                operand(f, a, 2)?;
                f.write_str(" and ")?;
                operand(f, b, 3)
            }
            Formula::Or(a, b) | Formula::IOr(a, b) => {
                operand(f, a, 1)?;
                f.write_str(if matches!(self, Formula::Or(..)) { " or " } else { " ior " })?;
                operand(f, b, 2)
            }
            Formula::TvpOr { left, right, preserved } => {
                operand(f, left, 1)?;
                f.write_str(" orp{")?;
                for (i, t) in preserved.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{}", Tuple(t))?;
                }
                f.write_str("} ")?;
                operand(f, right, 2)
            }
            Formula::Exists(x, b) => write!(f, "exists {x}. {b}"),
            Formula::Forall(x, b) => write!(f, "forall {x}. {b}"),
            Formula::Dep(t) => write!(f, "dep({t})"),
            Formula::Store { from, to, body } => {
                let to: Vec<Term> = to.iter().map(|u| Term::Var(u.clone())).collect();
                write!(f, "store {} -> {} . {body}", Tuple(from), Tuple(&to))
            }
            Formula::Restricted { kind, vars, bound, body } => {
                let (q, r) = kind.keyword();
                let xs: Vec<Term> = vars.iter().map(|x| Term::Var(x.clone())).collect();
                write!(f, "({q} {} {r} {}) {body}", Tuple(&xs), Tuple(bound))
            }
            Formula::Relativized { body, var } => write!(f, "rel {var} ({body})"),
        }
    }
}

impl fmt::Display for EsoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, k) in &self.quantified {
            write!(f, "EX {p}:{k} . ")?;
        }
        write!(f, "{}", self.matrix)
    }
}

pub fn pretty_print(phi: &Formula) -> String {
    phi.to_string()
}

pub fn pretty_print_eso(phi: &EsoFormula) -> String {
    phi.to_string()
}

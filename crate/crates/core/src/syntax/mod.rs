//! Formulas of inclusion-exclusion logic: abstract syntax, parsing,
//! printing and the reduction of derived operators to the core language.

mod analysis;
mod ast;
mod desugar;
mod parse;
mod print;

use thiserror::Error;

pub use analysis::{arity_profile, free_variables, is_sentence, raw_arity_profile, validate};
pub use ast::{
    conj, disj, try_conj, var_tuple, vars_of_tuple, ArityProfile, EsoFormula, Formula, Fragment, Restriction,
    Term, Vocabulary,
};
pub use desugar::{
    desugar, desugar_with, is_reserved, pad_atoms_to_arity, produces_inclusion, relativize, relativize_with,
    FreshSupply,
};
pub use parse::{parse_eso, parse_eso_with, parse_formula, parse_formula_with, ParseOptions};
pub use print::{pretty_print, pretty_print_eso};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("storing target `{0}` also occurs in the stored terms")]
    StoreOverlap(String),
    #[error("atom of arity {arity} exceeds the target arity {k}")]
    ArityExceeds { arity: usize, k: usize },
    #[error("the body of a sube quantifier must not contain inclusion atoms")]
    SubeBody,
    #[error("relativization variable `{0}` is bound in the body")]
    RelativizeBound(String),
    #[error("{0}")]
    Invalid(String),
}

impl SyntaxError {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        SyntaxError::Parse { pos, msg: msg.into() }
    }
}

//! Model checking under lax team semantics.
//!
//! Two engines decide `M ⊨_X φ`: a direct search over covers and choice
//! functions, and a reduction to propositional satisfiability. Both consume
//! the same compiled program; tests compare them against each other.

mod program;
mod sat;
mod search;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::structures::{team_values, Assignment, Model, StructureError, Team};
use crate::syntax::{Formula, SyntaxError};
use program::Program;

pub const DEFAULT_MAX_NODES: u64 = 10_000_000;

/// Search budget granted to the search engine before [`Strategy::Auto`]
/// switches to the SAT reduction.
const AUTO_SEARCH_NODES: u64 = 200;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("budget of {0} nodes exhausted")]
    BudgetExhausted(u64),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("derived operator given in core-only mode")]
    NotCore,
    #[error("formula is not first-order")]
    NotFirstOrder,
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("{0}")]
    Invalid(String),
}

/// Whether derived operators are evaluated by their truth conditions or
/// rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    CoreOnly,
    NativeSugar,
}

/// Optional shortcuts of the search engine, each sound by a closure property.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Gates {
    /// Restrict teams to the free variables of each subformula.
    pub locality: bool,
    /// Evaluate first-order subformulas row by row.
    pub flatness: bool,
    /// Use partitions and single witnesses below downward-closed subformulas.
    pub downward: bool,
}

impl Gates {
    pub const NONE: Gates = Gates { locality: false, flatness: false, downward: false };
    pub const ALL: Gates = Gates { locality: true, flatness: true, downward: true };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Search(Gates),
    Sat,
    /// Gated search under a small budget, then the SAT reduction.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalBudget {
    pub max_nodes: u64,
    pub mode: EvalMode,
    pub strategy: Strategy,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget { max_nodes: DEFAULT_MAX_NODES, mode: EvalMode::NativeSugar, strategy: Strategy::Auto }
    }
}

impl EvalBudget {
    pub fn with_nodes(max_nodes: u64) -> Self {
        EvalBudget { max_nodes, ..Self::default() }
    }

    pub fn strategy(self, strategy: Strategy) -> Self {
        EvalBudget { strategy, ..self }
    }

    pub fn mode(self, mode: EvalMode) -> Self {
        EvalBudget { mode, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOutcome {
    pub value: bool,
    pub nodes_used: u64,
}

/// A formula compiled for teams over a fixed domain; reusable across models
/// and teams.
#[derive(Clone, Debug)]
pub struct Evaluator {
    program: Program,
    budget: EvalBudget,
}

impl Evaluator {
    pub fn new(phi: &Formula, domain: &[String], budget: EvalBudget) -> Result<Self, EvalError> {
        if budget.max_nodes == 0 {
            return Err(EvalError::Invalid("budget must be at least 1".into()));
        }
        let program = Program::compile(phi, domain, budget.mode == EvalMode::NativeSugar)?;
        Ok(Evaluator { program, budget })
    }

    pub fn domain(&self) -> &[String] {
        &self.program.slots[..self.program.domain_len]
    }

    pub fn eval(&self, m: &Model, x: &Team) -> Result<EvalOutcome, EvalError> {
        x.check_universe(m)?;
        let x = if x.domain() == self.domain() { x.clone() } else { x.reorder(self.domain())? };
        let view = self.program.bind(m)?;
        let width = self.program.width();
        let rows: Vec<Vec<u8>> = x
            .rows()
            .iter()
            .map(|r| {
                let mut row = r.clone();
                row.resize(width, 0);
                row
            })
            .collect();
        let max = self.budget.max_nodes;
        let search = |gates: Gates, max: u64| {
            let mut s = search::Search::new(&self.program, &view, gates, max);
            let v = s.sat(self.program.root, rows.clone());
            (v.ok(), s.used.min(max))
        };
        let sat = |max: u64| sat::decide(&self.program, &view, &rows, max).ok();
        let (value, used) = match self.budget.strategy {
            Strategy::Search(gates) => search(gates, max),
            Strategy::Sat => match sat(max) {
                Some((v, used)) => (Some(v), used),
                None => (None, max),
            },
            Strategy::Auto => match search(Gates::ALL, max.min(AUTO_SEARCH_NODES)) {
                (Some(v), used) => (Some(v), used),
                (None, spent) if spent < max => match sat(max - spent) {
                    Some((v, used)) => (Some(v), spent + used),
                    None => (None, max),
                },
                (None, _) => (None, max),
            },
        };
        match value {
            Some(value) => Ok(EvalOutcome { value, nodes_used: used }),
            None => Err(EvalError::BudgetExhausted(max)),
        }
    }
}

/// Decides `M ⊨_X φ`. Requires `fr(φ) ⊆ dom(X)`.
pub fn satisfies(m: &Model, x: &Team, phi: &Formula, budget: &EvalBudget) -> Result<EvalOutcome, EvalError> {
    Evaluator::new(phi, x.domain(), *budget)?.eval(m, x)
}

/// Tarski truth of a first-order formula under a single assignment.
pub fn satisfies_singleton(m: &Model, s: &Assignment, phi: &Formula) -> Result<bool, EvalError> {
    if !phi.is_first_order() {
        return Err(EvalError::NotFirstOrder);
    }
    let domain: Vec<String> = s.keys().cloned().collect();
    let program = Program::compile(phi, &domain, false)?;
    let view = program.bind(m)?;
    let mut row: Vec<u8> = s.values().copied().collect();
    if let Some(&a) = row.iter().find(|&&a| a as usize >= m.size()) {
        return Err(StructureError::OutOfUniverse(a as usize).into());
    }
    row.resize(program.width(), 0);
    Ok(view.tarski(&program, program.root, &mut row))
}

/// Evaluates an inclusion or exclusion atom, or its contradictory negation
/// when `polarity` is false: `¬(t̄₁⊆t̄₂)` as `t̄₁|t̄₂` and `¬(t̄₁|t̄₂)` as
/// `t̄₁⋈t̄₂`.
pub fn check_negated_atom(m: &Model, x: &Team, atom: &Formula, polarity: bool) -> Result<bool, EvalError> {
    let images = |a: &[crate::syntax::Term], b: &[crate::syntax::Term]| -> Result<_, EvalError> {
        let ia: BTreeSet<Vec<u8>> = team_values(m, x, a)?;
        let ib: BTreeSet<Vec<u8>> = team_values(m, x, b)?;
        Ok((ia, ib))
    };
    match (atom, polarity) {
        (Formula::Inc(a, b), true) => images(a, b).map(|(ia, ib)| ia.is_subset(&ib)),
        (Formula::Inc(a, b), false) | (Formula::Exc(a, b), true) => images(a, b).map(|(ia, ib)| ia.is_disjoint(&ib)),
        (Formula::Exc(a, b), false) => images(a, b).map(|(ia, ib)| ia == ib),
        _ => Err(EvalError::Invalid("expected an inclusion or exclusion atom".into())),
    }
}

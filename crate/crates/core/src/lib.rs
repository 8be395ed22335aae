//! Model checking for inclusion-exclusion logic under lax team semantics,
//! together with translations to and from existential second-order logic.

pub mod syntax;
pub mod structures;
pub mod eval;
pub mod eso;
pub mod translate;
pub mod harness;

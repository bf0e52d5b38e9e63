//! Series-rational expressions over pomsets, pomset automata, and a
//! decision procedure for equivalence of expressions with parallel
//! composition.
//!
//! The pipeline: compile expressions to fork-acyclic automata ([`kleene`]),
//! normalize those to well-structured automata ([`wellstruct`]), and compare
//! states through their atoms ([`equiv`]). [`oracle`] provides brute-force
//! bounded semantics for testing.

pub mod cli;
pub mod equiv;
pub mod error;
pub mod kleene;
pub mod multiset;
pub mod oracle;
pub mod pa;
pub mod pomset;
pub mod srexpr;
pub mod wellstruct;
mod syntax;

pub use error::{Error, Result};
pub use multiset::Multiset;
pub use pa::{Pa, StateId};
pub use pomset::{Kind, Letter, SpTerm};
pub use srexpr::Expr;

//! Reference implementations used to cross-check the evaluator and the
//! solver on small three-day cases.
//!
//! Nothing here calls into the core checkers, the core costing or the
//! solver's search space. Only the data types are shared.

pub mod enumerate;
pub mod mutate;
pub mod verdict;

pub use enumerate::{enumerate, feasible, small_case, MAX_ROWS};
pub use mutate::mutations;
pub use verdict::{cost, verdicts, Verdict};

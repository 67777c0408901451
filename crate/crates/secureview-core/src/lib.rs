//! Privacy-preserving views over scientific-workflow provenance.
//!
//! A workflow is a DAG of modules, each a total function from input
//! attributes to output attributes; its executions form a relation that
//! satisfies one functional dependency `I_i -> O_i` per module. Hiding a
//! set of attribute columns (and optionally the identity of some public
//! modules) yields a projected view, and a module is Γ-private under that
//! view when every input has at least Γ indistinguishable outputs across
//! the possible worlds consistent with the view.
//!
//! The crate provides:
//!
//! * [`model`] — attributes, module behaviors, workflow validation and
//!   execution, relations and projections.
//! * [`privacy`] — possible-world enumeration, out-sets, standalone and
//!   workflow safety checks, and flip-based certificate worlds.
//! * [`standalone`] — minimum-cost safe subsets for a single module and
//!   extraction of per-module requirement lists.
//! * [`lp`] — an exact rational LP/IP kernel (dense simplex with Bland's
//!   rule, branch and bound) plus builders for the three secure-view
//!   program formulations.
//! * [`solvers`] — the secure-view algorithms: exact baseline, randomized
//!   LP rounding, threshold rounding, bounded-sharing greedy, the
//!   privatization variant for workflows with public modules, and the
//!   union-of-standalone baseline.
//! * [`harness`] — instance generators and approximation-ratio reporting.

pub mod budget;
pub mod error;
pub mod harness;
pub mod lp;
pub mod model;
pub mod privacy;
pub mod rational;
pub mod rng;
pub mod solvers;
pub mod standalone;

pub use budget::Budget;
pub use error::Error;
pub use rational::Rational;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

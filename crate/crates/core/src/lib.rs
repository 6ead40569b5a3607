//! Markov branching fragmentation trees with Gibbs-type splitting rules.
//!
//! A fragmentation tree on a finite label set arises by recursively
//! partitioning the set into at least two blocks until only singletons
//! remain. This crate implements the exchangeable Markov branching models
//! whose splitting rules have Gibbs form: Aldous' beta-splitting family in
//! the binary case (extended range `beta > -2`) and the two-parameter
//! Ewens-Pitman family in the multifurcating case, together with:
//!
//! - exact weight, normalization and rate tables in arbitrary-precision
//!   rational arithmetic ([`model`], [`rates`]);
//! - exact verification of the sampling-consistency identities, normalization
//!   and the tree-probability factorizations ([`checks`]);
//! - random generation by top-down branching and by sequential leaf growth,
//!   with exact attachment distributions ([`sample`]);
//! - exhaustive enumeration of fragmentations, signatures and shape
//!   collisions ([`enumerate`]);
//! - moment and paintbox integral-representation checks ([`measures`]);
//! - JSON / Newick / DOT serialization ([`format`]).
//!
//! Numeric mode is a type parameter: instantiate models at [`Rational`] for
//! exact work or at `f64` for approximate work with irrational parameters.

// Admissibility and positivity guards are written as negated comparisons
// (`!(x > y)`) on purpose: in float mode a NaN parameter must fail the guard.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod closed_forms;
pub mod enumerate;
pub mod error;
pub mod format;
pub mod labels;
pub mod measures;
pub mod model;
pub mod rates;
pub mod sample;
pub mod scalar;
pub mod tree;

pub use error::{Error, Result};
pub use labels::LabelSet;
pub use model::{BetaParam, GibbsModel, Regime};
pub use scalar::Scalar;
pub use tree::{FragTree, Signature, TreeDefect, TreeShape};

/// Exact scalar type: arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

/// Model in exact numeric mode.
pub type ExactModel = GibbsModel<Rational>;

/// Model in approximate (f64) numeric mode.
pub type FloatModel = GibbsModel<f64>;

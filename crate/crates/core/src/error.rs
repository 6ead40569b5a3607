//! Library error type.

use crate::tree::TreeDefect;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("label {0} out of range (labels must lie in 1..=64)")]
    LabelOutOfRange(u32),
    #[error("invalid tree: {0}")]
    InvalidTree(#[from] TreeDefect),
    #[error("restriction target must be a non-empty subset of the root label set")]
    BadRestriction,
    #[error("inadmissible model parameters: {0}")]
    InadmissibleModel(String),
    #[error("operation requires exact (rational) numeric mode")]
    RequiresExactMode,
    #[error("unsupported operation for this model regime: {0}")]
    Unsupported(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("size {requested} exceeds enumeration cap {cap}")]
    CapExceeded { requested: u32, cap: u32 },
    #[error("tree has probability zero under this model: {0}")]
    ZeroProbabilityTree(String),
    #[error("quadrature did not converge within its evaluation budget")]
    QuadratureDivergence,
    #[error("not a valid rate sequence: {0}")]
    InvalidRateSequence(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

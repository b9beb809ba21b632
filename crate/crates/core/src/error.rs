use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arithmetic overflow")]
    Overflow,

    #[error("radix {0} is below 2")]
    InvalidRadix(u64),

    #[error("digit {digit} at index {index} is not below radix {radix}")]
    InvalidDigit { index: usize, digit: u64, radix: u64 },

    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The requested target is not below the Nim sum of the position.
    #[error("losing position: target {target} is not below nim sum {nim_sum}")]
    LosingPosition { nim_sum: u64, target: u64 },

    /// The vector is a member of the maximum system, so no position is left
    /// unchanged in value by adding it.
    #[error("vector is a member of the maximum system; no non-move witness exists")]
    NotAFudge,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

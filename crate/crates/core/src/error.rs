//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("conditioning variable `{0}` is not produced by any earlier factor")]
    DanglingConditioning(String),

    #[error("variable `{0}` is produced by more than one factor")]
    DuplicateOutput(String),

    #[error("variable `{name}` has cardinality {got}, expected {expected}")]
    CardinalityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("mass is not normalized: sums to {sum}")]
    NotNormalized { sum: f64 },

    #[error("table with {cells} cells exceeds the cap of {cap}")]
    TooLarge { cells: u128, cap: u128 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(
        "Markov chain violated: I(U;X|V1) = {residual_uv1x:.3e}, \
         I(U;X|V2) = {residual_uv2x:.3e} (tolerance {tolerance:.1e})"
    )]
    MarkovViolation {
        residual_uv1x: f64,
        residual_uv2x: f64,
        tolerance: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

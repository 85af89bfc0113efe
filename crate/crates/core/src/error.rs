use thiserror::Error;

use crate::qmat::Qubit;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("qubit {0} is not part of the register")]
    UnknownLabel(Qubit),

    #[error("qubit {0} appears more than once in the register")]
    DuplicateLabel(Qubit),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("amplitude vector has zero norm")]
    ZeroVector,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("expected a {expected}-qubit register, got {actual} qubits")]
    WrongRegisterSize { expected: usize, actual: usize },

    /// The state is (numerically) of lower rank or has coinciding weights, so
    /// the closed-form two-term decomposition does not apply.
    #[error("degenerate spectrum: {0}")]
    Degenerate(String),

    #[error("numerical rank {0} exceeds the supported rank 2")]
    RankTooHigh(usize),

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

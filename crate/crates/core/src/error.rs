use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("eigensolver did not converge")]
    NonConvergence,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("selection of parties is empty")]
    EmptySelection,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid mixedness factor {0} (must be >= 1)")]
    InvalidFactor(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("state is not physical: {0}")]
    NonPhysical(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("transform is not symplectic (|S D S^T - D|_F = {0:e})")]
    NotSymplectic(f64),

    #[error("closed-form denominator degenerates ({0:e})")]
    DegenerateDenominator(f64),

    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

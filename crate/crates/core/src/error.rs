use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("non-finite entry in matrix or vector")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    #[error("singular matrix")]
    Singular,

    #[error("constraint cardinality mismatch: {left} vs {right} (pad the smaller set with dummy_pad first)")]
    CardinalityMismatch { left: usize, right: usize },

    #[error("duplicate family parameter: {0}")]
    DuplicateParameter(String),

    #[error("rank-1 splitting failed: {0}")]
    SplitFailed(String),

    #[error("extraction failed: {0}")]
    ExtractionFailed(String),

    #[error("no feasible point found in the search box")]
    NoFeasiblePoint,
}

use thiserror::Error;

/// Errors raised by state construction, measures and polytope operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max |a_ij - conj(a_ji)| = {max_violation:e})")]
    NotHermitian { max_violation: f64 },

    #[error("trace is not one (|tr - 1| = {deviation:e})")]
    TraceNotOne { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },

    #[error("state carries no bipartite factor dimensions")]
    NoFactorDims,

    #[error("operation supports only two-qubit states, got factor dims ({0}, {1})")]
    UnsupportedDims(usize, usize),

    #[error("generator basis needs d >= 2, got {0}")]
    DimTooSmall(usize),

    #[error("matrix is not unitary (max |U U^dagger - I| = {max_violation:e})")]
    NotUnitary { max_violation: f64 },

    #[error("invalid separable decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("factor {index} of subsystem {subsystem} is not pure (second eigenvalue {second_eigenvalue:e})")]
    FactorNotPure { subsystem: u8, index: usize, second_eigenvalue: f64 },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error(
        "entropy test and fixed-point test disagree (reduced entropy {entropy:e}, distance to product {distance:e})"
    )]
    CriteriaDisagree { entropy: f64, distance: f64 },

    #[error("segment needs at least 2 points, got {0}")]
    BadCount(usize),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("polytope has no vertices")]
    EmptyPolytope,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("entry ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize },
    #[error("matrix is not Hermitian: |M[{i}][{j}] - conj(M[{j}][{i}])| = {deviation:e}")]
    NotHermitian { i: usize, j: usize, deviation: f64 },
    #[error("diagonal entry {i} deviates from 1 by {deviation:e}")]
    BadDiagonal { i: usize, deviation: f64 },
    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("entry ({i}, {j}) has modulus {modulus:e}, below the zero threshold")]
    ZeroEntry { i: usize, j: usize, modulus: f64 },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("centering vector must satisfy <u, s> = 1, got {0}")]
    BadCentering(num_complex::Complex64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("not a Euclidean distance matrix candidate: {0}")]
    InvalidEdm(String),
    #[error("matrix is not a Euclidean distance matrix (centered minimum eigenvalue {min_eigenvalue:e})")]
    NotEdm { min_eigenvalue: f64 },
    #[error("entry ({i}, {j}) is not real and positive")]
    NotRealPositive { i: usize, j: usize },
    #[error("candidate set has {count} integer matrices, exceeding the budget of {max}")]
    CandidateBudgetExceeded { count: u128, max: u64 },
    #[error("reconstructed Gram matrix deviates from the target by {error:e}")]
    ReconstructionFailed { error: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

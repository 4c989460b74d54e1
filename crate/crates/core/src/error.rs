use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u64, right: u64 },

    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: u64, value: f64 },

    #[error("total mass {mass} differs from 1 by more than {tol}")]
    BadNormalization { mass: f64, tol: f64 },

    #[error("{what} = {got} exceeds limit {limit}")]
    SizeLimit {
        what: &'static str,
        got: u64,
        limit: u64,
    },

    #[error("{name} = {value} out of range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("matrix is not Hermitian: deviation {deviation} at ({row},{col})")]
    NotHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("operator is not positive semidefinite: smallest eigenvalue {eigenvalue}")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps, off-diagonal residual {residual}")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("coupling is not square: {rows}x{cols}")]
    NotSquare { rows: u64, cols: u64 },

    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    #[error("conditioning prefix has zero mass")]
    ZeroMassPrefix,

    #[error("outcome count {n} is not a power of two, bit-string indexing unavailable")]
    NotPowerOfTwo { n: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

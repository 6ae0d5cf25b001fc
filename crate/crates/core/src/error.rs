use thiserror::Error;

/// Errors raised by the spectral solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported basis {basis} for {operation}")]
    UnsupportedBasis {
        basis: &'static str,
        operation: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Robin coefficient undefined: ln(R)*(i+1)*(i+3) = 1 at i = {index}")]
    DegenerateRobin { index: usize },

    #[error("matrix is singular or not positive definite (pivot {pivot})")]
    SingularMatrix { pivot: usize },

    #[error("Gauss-Lobatto Newton iteration did not converge for node {node} of {points}")]
    QuadratureNotConverged { node: usize, points: usize },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("operation requires a {expected} model")]
    WrongModel { expected: &'static str },

    #[error("breakdown: {0}")]
    Breakdown(&'static str),

    #[error("non-finite value encountered at iteration {iteration}")]
    NonFinite { iteration: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors shared by every module of the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unitary: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry encountered")]
    NonFiniteEntry,

    #[error("eigensolver failed: {0}")]
    EigensolverFailure(String),

    #[error("polar projection did not converge after {0} iterations")]
    ConvergenceFailure(usize),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("need at least two distinct elements, got {0}")]
    Cardinality(usize),

    #[error("action is not isometric: {0}")]
    NotIsometric(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by the solvers and their supporting machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator contract violated: {0}")]
    ContractViolation(String),

    #[error("eigendecomposition failed for block {block}")]
    Eigendecomposition { block: usize },

    #[error("matrix factorization failed: {0}")]
    Factorization(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("root solver failed to converge: {0}")]
    RootSolver(String),

    #[error("SINR target of user {user} is unreachable for the given point")]
    InfeasibleSinr { user: usize },

    #[error("reference solve did not reach the requested accuracy")]
    ReferenceNotConverged,

    #[error("structured and dense dual solves disagree: {0}")]
    DualSolveMismatch(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

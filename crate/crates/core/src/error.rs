use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("size budget exceeded: {0}")]
    Budget(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("map is not injective: {0}")]
    NotInjective(String),
    #[error("intersection type contains the forbidden graph")]
    TypeNotAFree,
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("matrix is not symmetric")]
    Asymmetric,
    #[error("polynomial is not invariant: {0}")]
    NotInvariant(String),
    #[error("problem is infeasible: {0}")]
    Infeasible(String),
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    #[error("rounding failed: {0}")]
    Rounding(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

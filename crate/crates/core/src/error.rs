use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("non-finite numeric input: {0}")]
    NumericInput(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("singular geometry: {0}")]
    SingularGeometry(String),

    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("unsupported system: {0}")]
    UnsupportedSystem(String),

    #[error("invalid bounds: {0}")]
    Bounds(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("curvature condition <dg, dw> > 0 violated (got {0})")]
    CurvatureCondition(f64),

    #[error("inner CG did not reach tolerance within {max_iters} iterations (last residual {residual})")]
    InnerSolve { residual: f64, max_iters: usize },

    #[error("line search exceeded {max_tests} condition tests (bad initial step or non-smooth objective)")]
    LineSearchExhausted { max_tests: usize },

    #[error("schedule '{0}' needs an ensemble distance estimate; run with replicas >= 2")]
    MissingEnsemble(&'static str),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

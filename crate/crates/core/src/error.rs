use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("could not build a connected {kind} graph after {attempts} attempts")]
    RetryCapExceeded { kind: &'static str, attempts: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("eigen-solver failure: {0}")]
    Eigen(String),

    #[error("ties detected in data at indices {0} and {1}")]
    Ties(usize, usize),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("target is not unique: {0}")]
    NonUniqueTarget(String),

    #[error("singular design matrix")]
    Singular,

    #[error("state space too large: n = {0} (at most 7 nodes)")]
    StateSpaceTooLarge(usize),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

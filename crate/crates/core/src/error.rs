use thiserror::Error;

/// Errors produced by the toolkit's library layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unbalanced classes: {human} human vs {llm} llm samples")]
    Unbalanced { human: usize, llm: usize },

    #[error("both classes required, got only {0}")]
    SingleClass(String),

    #[error("feature names mismatch: {0}")]
    FeatureMismatch(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("endpoint error: {0}")]
    Endpoint(#[from] EndpointError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Failures of an external scorer/rewriter endpoint.
#[derive(Debug, Error)]
pub enum EndpointError {
    #[error("transport failure after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },

    #[error("malformed response: {0}")]
    Malformed(String),

    #[error("context overflow: {0}")]
    ContextOverflow(String),

    #[error("endpoint returned empty generation twice")]
    EmptyGeneration,
}

impl Error {
    /// Coarse classification used by callers that map errors to exit codes.
    pub fn is_endpoint(&self) -> bool {
        matches!(self, Error::Endpoint(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested computation has no implementation for these inputs.
    #[error("capability error: {0}")]
    Capability(String),
    /// A numerical routine stopped before reaching its target accuracy.
    #[error("accuracy error: {message} (best estimate {best_estimate})")]
    Accuracy { message: String, best_estimate: f64 },
    /// A per-sample numerical failure inside an estimator.
    #[error("numerical error at sample {index}: {message}")]
    Numerical { index: usize, message: String },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

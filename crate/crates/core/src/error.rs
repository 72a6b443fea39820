use thiserror::Error;

/// Errors raised by the coupling library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision error: {0}")]
    Precision(String),

    #[error("singular system: anchors {first} and {second} share x = {x}")]
    SingularSystem { first: usize, second: usize, x: f64 },

    #[error("degree mismatch for {name}: degree {degree} needs {expected} anchors, got {got}")]
    DegreeMismatch {
        name: String,
        degree: usize,
        expected: usize,
        got: usize,
    },

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

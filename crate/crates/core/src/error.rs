use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Schedule description could not be parsed.
    #[error("schedule parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid grid step: {0}")]
    InvalidStep(String),

    #[error("invalid address: {0}")]
    InvalidAddress(String),

    #[error("invalid point spec: {0}")]
    PointSpec(String),

    #[error("invalid measure expression: {0}")]
    Expression(String),

    /// The point is not localized finely enough for the requested certainty.
    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("estimation window too small: {0}")]
    Window(String),

    #[error("insufficient samples: {0}")]
    Samples(String),

    /// A measure interval with zero lower bound where a positive one is needed.
    #[error("degenerate measure interval: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    Argument(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

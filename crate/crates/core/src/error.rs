use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frank-length-not-square: N = {0} is not a perfect square")]
    FrankLengthNotSquare(usize),

    #[error("zero-polynomial")]
    ZeroPolynomial,

    #[error("coordinate index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("alphabet mismatch: expected {expected}, found {found}")]
    AlphabetMismatch { expected: String, found: String },

    #[error("sequence is not binary")]
    NotBinary,

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("schema error in field `{field}`: {message}")]
    Schema { field: String, message: String },
}

impl Error {
    pub(crate) fn schema(field: &str, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

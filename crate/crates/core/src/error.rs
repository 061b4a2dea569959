use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("item `{id}` has length {length}, which exceeds max_len {max_len}")]
    OversizeItem {
        id: String,
        length: usize,
        max_len: usize,
    },

    #[error("singular fit: {0}")]
    SingularFit(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("value {value} at byte {offset} is outside [0, 999]")]
    Range { offset: usize, value: u64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

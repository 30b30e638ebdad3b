use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown operator `{name}` at byte {offset}")]
    UnknownOperator { name: String, offset: usize },

    #[error("sampling exhausted after {attempts} attempts: {what}")]
    SamplingExhausted { attempts: usize, what: String },

    #[error("pair generation failed after {attempts} attempts, last rejection: {last_reason}")]
    GenerationFailed { attempts: usize, last_reason: String },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("shard format error in {path:?} at record {record}: {message}")]
    ShardFormat {
        path: PathBuf,
        record: usize,
        message: String,
    },

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

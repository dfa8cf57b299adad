use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unbounded flow: some s-t path consists of infinite-capacity edges")]
    UnboundedFlow,

    #[error("pair not separated: {0}")]
    NotSeparated(String),

    #[error("cut is not a union of structure nodes")]
    NotRepresentable,

    #[error("edge {0} is not vital")]
    NotVital(usize),

    #[error("unknown edge id {0}")]
    UnknownEdge(usize),

    #[error("limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An exact computation or table would exceed its configured cap.
    #[error("capacity exceeded: {what} = {requested} (cap {cap})")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    /// A randomness source could not deliver the requested bits.
    #[error("randomness source: {0}")]
    Source(String),

    /// A combiner or expander configuration is inconsistent.
    #[error("configuration: {0}")]
    Config(String),

    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

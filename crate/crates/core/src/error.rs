use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model parameter violates its documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An experiment configuration is inconsistent or incomplete.
    #[error("configuration error: {0}")]
    Config(String),

    /// A plain-text artifact could not be parsed.
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The graph has no pair of connected nodes, so path length is undefined.
    #[error("no connected pairs in graph")]
    NoConnectedPairs,

    /// A latency ratio was requested for a run without a defined latency.
    #[error("latencies are incomparable: {0}")]
    Incomparable(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

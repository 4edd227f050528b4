//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A data file failed validation; `line` is 1-based and counts the
    /// header line of the format where one exists.
    #[error("parse error in {path} at line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// An operation that needs a connected graph got a disconnected one.
    #[error("graph is disconnected")]
    Disconnected,

    /// A sampling request asked for more groups than the collection has.
    #[error("insufficient groups: need {needed}, have {available}")]
    InsufficientGroups { needed: usize, available: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

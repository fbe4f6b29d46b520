use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::pipeline::ProtocolViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("{path}: I/O error: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("line {line}: malformed input {content:?}")]
    MalformedLine { line: usize, content: String },

    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Protocol(#[from] ProtocolViolation),

    #[error("runtime failure: {0}")]
    Runtime(String),
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}

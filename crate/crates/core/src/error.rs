use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },

    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty corpus: no documents found in {}", .0.display())]
    EmptyCorpus(PathBuf),

    #[error("vocabulary is empty after tokenization and stopword filtering")]
    EmptyVocabulary,

    #[error("term selection is empty: no term reaches the requested score")]
    EmptySelection,

    #[error("zero vector for '{0}': cosine is undefined")]
    ZeroVector(String),

    #[error("factor analysis needs at least 2 non-constant variables, found {0}")]
    TooFewVariables(usize),

    #[error("no eigenvalue exceeds 1, so the Kaiser rule retains no factors; pass an explicit factor count")]
    NoFactorsRetained,

    #[error("graph is disconnected; split it into components before running Kamada-Kawai")]
    Disconnected,

    #[error("duplicate label '{0}'")]
    DuplicateLabel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn read(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Read {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn write(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Write {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for failures of the filesystem rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Read { .. } | Error::Write { .. })
    }
}

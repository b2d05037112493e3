use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A malformed input file. `line` is 1-based.
    #[error("{file}: {msg} at line {line}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    #[error("label count mismatch: {found} labels for {expected} documents")]
    LabelCountMismatch { expected: usize, found: usize },

    #[error("invalid hyperparameters: {0}")]
    Hyperparams(String),

    #[error("invalid synthetic spec: {0}")]
    SyntheticSpec(String),

    #[error("invalid corpus: {0}")]
    Corpus(String),

    #[error("class {0} has no documents")]
    EmptyClass(usize),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(file: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            msg: msg.into(),
        }
    }

    /// True for errors caused by the filesystem rather than by content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

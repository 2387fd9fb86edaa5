//! Error type shared across the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}:{line}: unknown {namespace} symbol '{symbol}' under frozen vocabulary")]
    OutOfVocabulary {
        path: PathBuf,
        line: usize,
        namespace: &'static str,
        symbol: String,
    },

    #[error("{path}:{line}: confidence {value} outside (0, 1]")]
    ConfidenceRange {
        path: PathBuf,
        line: usize,
        value: f64,
    },

    #[error("degenerate corpus: {0}")]
    DegenerateCorpus(String),

    #[error("empty candidate set for {0}")]
    EmptyCandidates(&'static str),

    #[error("model has {model} {what} but vocabulary has {vocab}")]
    VocabMismatch {
        what: &'static str,
        model: usize,
        vocab: usize,
    },

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("objective requires a confidence but the belief has none")]
    MissingConfidence,

    #[error("loss became NaN at epoch {epoch}, belief index {belief_index}")]
    NumericalAbort { epoch: usize, belief_index: usize },

    #[error("model file {path}: {msg}")]
    ModelFormat { path: PathBuf, msg: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

//! Crate-wide error type.

use std::path::PathBuf;

/// Errors raised by corpus noising, lexicon loading, scoring, and backends.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid token: {0}")]
    InvalidToken(String),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    /// An operation was called outside its contract (bad index, wrong
    /// symbol, token too short).
    #[error("{op}: {detail}")]
    Contract { op: &'static str, detail: String },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("lexicon line {line}: {detail}")]
    LexiconParse { line: usize, detail: String },

    #[error("line count mismatch: {hypotheses} hypothesis lines vs {references} reference lines")]
    LineCountMismatch {
        hypotheses: usize,
        references: usize,
    },

    #[error("empty reference at line {line}")]
    EmptyReference { line: usize },

    #[error("empty corpus: at least one line is required")]
    EmptyCorpus,

    #[error("baseline score missing: cannot compute delta")]
    MissingBaseline,

    #[error("backend failure: {0}")]
    Backend(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn contract(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Contract {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

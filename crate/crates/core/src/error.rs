use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the detection pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot fit TF-IDF on an empty corpus")]
    EmptyCorpus,

    #[error("training data is empty")]
    EmptyData,

    #[error("labels contain a single class")]
    SingleClassData,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("model format error: {0}")]
    Format(String),

    #[error("tile byte span {start}..{end} exceeds file `{file}` ({len} bytes)")]
    SpanOutOfRange {
        file: String,
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("{}: fewer than 2 submissions found (got {found})", dir.display())]
    NoSubmissions { dir: PathBuf, found: usize },

    #[error("{}:{line}: unknown submission id `{id}`", path.display())]
    UnknownId { path: PathBuf, line: u64, id: String },

    #[error("{}:{line}: pair ({a}, {b}) already labeled differently", path.display())]
    ConflictingLabel {
        path: PathBuf,
        line: u64,
        a: String,
        b: String,
    },

    #[error("{}:{line}: malformed row: {reason}", path.display())]
    MalformedRow {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("duplicate submission id `{0}`")]
    DuplicateId(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

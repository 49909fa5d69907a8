use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid thesaurus: {0}")]
    Thesaurus(String),

    #[error("empty seed file")]
    EmptySeeds,

    #[error("duplicate sense `{sense}` for verb `{verb}`")]
    DuplicateSense { verb: String, sense: String },

    #[error("unknown verb `{0}`")]
    UnknownVerb(String),

    #[error("unknown sense `{sense}` for verb `{verb}`")]
    UnknownSense { verb: String, sense: String },

    #[error("case `{case}` is not subcategorized by sense `{sense}` of `{verb}`")]
    CaseNotInFrame { verb: String, sense: String, case: String },

    #[error("empty example set")]
    EmptyFillerSet,

    #[error("invalid sentence `{id}`: {message}")]
    InvalidSentence { id: String, message: String },

    #[error("example `{0}` is not in the unlabeled pool")]
    NotInPool(String),

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("training complete: the unlabeled pool is empty")]
    PoolExhausted,

    #[error("empty input set")]
    EmptyInput,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

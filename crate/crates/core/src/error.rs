use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("missing input file {0}")]
    MissingFile(PathBuf),

    #[error("{file}:{line}: malformed row: {reason}")]
    MalformedRow {
        file: String,
        line: usize,
        reason: String,
    },

    #[error("{file}:{line}: duplicate id {id}")]
    DuplicateId {
        file: String,
        line: usize,
        id: String,
    },

    #[error("{file}:{line}: reference to unknown id {id}")]
    DanglingReference {
        file: String,
        line: usize,
        id: String,
    },

    #[error("value {0:?} cannot be written to a tab-separated field")]
    UnwritableField(String),

    #[error("matrix is empty")]
    EmptyMatrix,

    #[error("matrix shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("inverse transform left an imaginary component of {0:e}")]
    NonNegligibleImaginary(f64),

    #[error("invalid denoise configuration: {0}")]
    InvalidConfig(String),

    #[error("no statements to rank")]
    EmptyScores,

    #[error("all paired differences are zero")]
    AllDifferencesZero,

    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("empty sample")]
    EmptySample,

    #[error("ground truth is empty")]
    EmptyGroundTruth,

    #[error("invalid scenario parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

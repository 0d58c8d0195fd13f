//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty chunk")]
    EmptyChunk,

    #[error("stream too short: {len} byte(s) is less than one {chunk_size}-byte chunk")]
    StreamTooShort { len: usize, chunk_size: usize },

    #[error("no resolution levels: stream length {0} is below 2")]
    NoResolutionLevels(usize),

    #[error("malformed PE: {0}")]
    MalformedPe(String),

    #[error("degenerate labels: training data contains a single class")]
    DegenerateLabels,

    #[error("non-finite feature value in sample {sample}, column {column}")]
    NonFinite { sample: usize, column: usize },

    #[error("spectrum length {got} does not match model size group {expected}")]
    SizeGroupMismatch { got: usize, expected: usize },

    #[error("unseen size group: J={got} exceeds dictionary J_max={j_max}")]
    UnseenSizeGroup { got: usize, j_max: usize },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("non-nested or unconverged fits: full log-likelihood {full} below null {null}")]
    NonNestedFits { full: f64, null: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

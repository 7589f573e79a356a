use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("parameter `{name}` out of range: {reason}")]
    Parameter { name: String, reason: String },

    #[error("truncation length must be at least 1")]
    EmptyTruncation,

    #[error("window {window} must be smaller than the vector length {len}")]
    WindowTooLarge { window: usize, len: usize },

    #[error("truncation N = {n} too small: need N >= {required}")]
    TruncationTooSmall { n: usize, required: usize },

    #[error("zero diagonal entry at row {row}; the matrix is not invertible")]
    ZeroDiagonal { row: usize },

    #[error("matrix `{0}` is not lower triangular")]
    NotTriangular(String),

    #[error("series for entry ({row}, {col}) did not settle within {cutoff} terms")]
    InconclusiveEntry { row: usize, col: usize, cutoff: usize },

    #[error("row series {row} did not settle within {cutoff} terms")]
    RowSeriesDivergent { row: usize, cutoff: usize },

    #[error("{0} requires a classical space, got a domain space")]
    ClassicalRequired(String),

    #[error("unsupported class ({from} : {to}); supported cells: {supported}")]
    UnsupportedClass { from: String, to: String, supported: String },

    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),

    #[error("no sample generator for space {0}")]
    NoSampler(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("operation not available in {mode} mode: {what}")]
    Mode { mode: String, what: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::Parameter { name: name.to_string(), reason: reason.into() }
    }
}

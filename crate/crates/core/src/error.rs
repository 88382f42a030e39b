use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("index ({row}, {col}) out of range for a {rows}x{cols} operator")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("operation needs a square operator, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("commutant of an empty operator list is undefined")]
    EmptyOperatorList,
    #[error("operator does not preserve the shells m+n = N: entry ({row}, {col}) crosses shells")]
    NotShellPreserving { row: usize, col: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal consistency error: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

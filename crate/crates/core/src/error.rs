use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} exceeds the supported limit {max}")]
    SizeLimit {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("creation would exceed truncation degree {max}; rerun with a larger truncation m")]
    Truncation { max: usize },

    #[error("invalid commutation coefficient mu({i},{j}) = {value}: must be finite and non-zero")]
    InvalidCoefficient { i: usize, j: usize, value: f64 },

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("tuple does not induce a pair partition: {0}")]
    NotPairClass(String),

    #[error("state width {found} does not match operator width {expected}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),
}

pub type Result<T> = std::result::Result<T, Error>;

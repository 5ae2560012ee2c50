use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector width must be a power of two in 1..={max}, got {got}")]
    InvalidVectorWidth { got: usize, max: usize },
    #[error("frontier precision must be one of 1, 2, 4, 8, 16 vectors per group, got {0}")]
    InvalidPrecision(usize),
    #[error("fullness threshold must lie in [0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("vertex {vertex} out of range for graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: u64, vertex_count: usize },
    #[error("edge list mixes weighted and unweighted edges")]
    MixedWeights,
    #[error("edge weights must be positive")]
    ZeroWeight,
    #[error("edge list is already weighted")]
    AlreadyWeighted,
    #[error("application requires edge weights but the graph is unweighted")]
    MissingWeights,
    #[error("size mismatch: {what} has {got} entries, expected {expected}")]
    SizeMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid generator spec: {0}")]
    InvalidGenSpec(String),
}

/// Edge-list text parsing failure, carrying the 1-based line number.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

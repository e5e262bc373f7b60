use thiserror::Error;

/// Errors raised by graph loading, the solvers and the model exchange layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: no edges found")]
    EmptyInput,

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph is disconnected: vertices {0} and {1} lie in different components")]
    Disconnected(u64, u64),

    #[error("vertex set must not be empty")]
    EmptySet,

    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("closeness undefined: group farness is zero")]
    ClosenessUndefined,

    #[error("invalid k = {k}: must satisfy 1 <= k <= {max}")]
    InvalidK { k: usize, max: usize },

    #[error("expected a set of size {expected}, got {actual}")]
    SetSize { expected: usize, actual: usize },

    #[error("initial set is not contained in the search space (vertex {0})")]
    OutsideSearchSpace(usize),

    #[error("enumeration guard exceeded: {combinations} combinations > {limit}")]
    GuardExceeded { combinations: u128, limit: u128 },

    #[error("only {available} center-eligible vertices remain, but k = {k}")]
    TooFewCenters { available: usize, k: usize },

    #[error("infeasible assignment: row {0} violated")]
    Infeasible(String),

    #[error("variable {name} has non-binary value {value}")]
    NonBinary { name: String, value: f64 },

    #[error("unknown variable {0}")]
    UnknownVariable(String),

    #[error("LP format error: {0}")]
    LpFormat(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("external solver failed: {0}")]
    Backend(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

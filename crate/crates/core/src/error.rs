use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("node pair ({i}, {j}) is not a valid upper-triangle pair for d = {d}")]
    PairOutOfRange { i: usize, j: usize, d: usize },

    #[error("edge index {k} out of range for d = {d}")]
    IndexOutOfRange { k: usize, d: usize },

    #[error("not a valid adjacency matrix: {0}")]
    InvalidAdjacency(String),

    #[error("node {node} has non-positive degree {degree}")]
    NonPositiveDegree { node: usize, degree: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("barrier breach at round {round}: minimum degree {min_degree:e} fell below the floor")]
    BarrierBreach { round: usize, min_degree: f64 },

    #[error("graph has an isolated node ({0})")]
    IsolatedNode(usize),

    #[error("no graph without isolated nodes after {0} draws")]
    InitGraphFailed(usize),

    #[error("batch solve did not converge at round {round} (residual {residual:e})")]
    NotConverged { round: usize, residual: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

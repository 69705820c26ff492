use thiserror::Error;

use crate::graph::Edge;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge {0} already present")]
    EdgeExists(Edge),
    #[error("edge {0} not present")]
    EdgeMissing(Edge),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge endpoints must be distinct (got {0},{0})")]
    SelfLoop(usize),
    #[error("removing bridge {0} would disconnect the graph (edge removals assume the result stays connected)")]
    BridgeRemoval(Edge),
    #[error("graph is disconnected but the operation requires a connected graph")]
    Disconnected,
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("random regular generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("argument {0} outside the domain |t| >= 1")]
    DomainError(f64),
    #[error("dense solve limited to {limit} vertices, graph has {n}")]
    SizeLimit { n: usize, limit: usize },
    #[error("iteration did not converge within {iterations} steps")]
    NoConvergence { iterations: usize },
    #[error("graph is not regular")]
    NotRegular,
    #[error("graph is regular but the check requires a nonregular graph")]
    NonRegularRequired,
    #[error(
        "additive gap {delta} does not exceed (2/c)sqrt(n)+2 for n={n}, c={c}; smallest admissible c is {min_c}"
    )]
    GapTooSmall { delta: f64, n: usize, c: f64, min_c: f64 },
    #[error("coordinate {vertex} of the rotated vector is not positive ({value})")]
    NonPositiveCoordinate { vertex: usize, value: f64 },
    #[error("endpoints at distance {distance:?} (None = unreachable) after removal exceed the allowed {allowed}")]
    DistanceTooLarge { distance: Option<usize>, allowed: usize },
    #[error("parameters too small: {0}")]
    ParametersTooSmall(String),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("numerical check failed: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use thiserror::Error;

use crate::hypergraph::Vertex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid edge {edge:?}: {reason}")]
    InvalidEdge { edge: Vec<Vertex>, reason: String },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("hypergraph is not partite with respect to the partition: {0}")]
    NotPartite(String),

    #[error("vertex {0} is not in the last part")]
    NotInLastPart(Vertex),

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("invalid transversal family: {0}")]
    MalformedSets(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("edge subset does not belong to this host")]
    ForeignSubset,

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

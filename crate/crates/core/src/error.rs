use thiserror::Error;

use crate::tree::Vertex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge list does not describe a spanning tree: {0}")]
    NotATree(String),

    #[error("vertex {0} is out of range")]
    BadVertex(Vertex),

    #[error("{what} size {actual} exceeds the configured limit {limit}")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("search node budget of {budget} exhausted")]
    Timeout { budget: u64 },

    #[error("initial solution does not cover every tree edge")]
    InfeasibleStart,

    #[error("instance is infeasible: {0}")]
    Infeasible(String),

    #[error("vertices {0} and {1} are not connected")]
    Disconnected(Vertex, Vertex),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: weight {value} is not positive{hint}")]
    NonPositiveWeight {
        line: usize,
        value: String,
        hint: &'static str,
    },

    #[error("line {line}: link endpoints must differ")]
    SelfLoopLink { line: usize },

    #[error("missing section {0}")]
    MissingSection(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

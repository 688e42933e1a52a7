use thiserror::Error;

use crate::graph::CAP;

/// Errors raised by graph construction and ear operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("ear endpoints must be distinct (got {0} twice)")]
    SameVertex(usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("an order-0 ear between {x} and {y} would duplicate an existing edge")]
    EdgeExists { x: usize, y: usize },
    #[error("{0} vertices exceed the capacity of {CAP}")]
    CapacityExceeded(usize),
    #[error("the given path is not an ear of the graph")]
    NotAnEar,
    #[error("{u}{v} is an edge, expected a non-edge")]
    NotANonEdge { u: usize, v: usize },
}

/// Errors raised while parsing graph6 text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Graph6Error {
    #[error("empty graph6 string")]
    Empty,
    #[error("invalid graph6 byte {0:#04x}")]
    InvalidByte(u8),
    #[error("graph6 header encodes {0} vertices, capacity is {CAP}")]
    TooLarge(usize),
    #[error("graph6 body has {found} bytes, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("graph6 padding bits are not zero")]
    Padding,
}

/// Errors raised when validating search configuration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("maximum vertex count {0} must lie in 3..={CAP}")]
    MaxVertices(usize),
    #[error("edge bound {max_e} is below the vertex bound {max_n}; no 2-connected graph qualifies")]
    EdgeBound { max_n: usize, max_e: usize },
    #[error("clique size r = {0} must be at least 3")]
    CliqueSize(usize),
    #[error("job residue {residue} must be below modulus {modulus}")]
    JobResidue { residue: usize, modulus: usize },
    #[error("job modulus must be positive")]
    JobModulus,
    #[error("worker count must be positive")]
    Workers,
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
}

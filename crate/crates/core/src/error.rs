use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("hypergraph has {0} vertices; at most 64 are supported")]
    TooManyVertices(usize),

    #[error("vertex {vertex} out of range (vertex count {count})")]
    VertexOutOfRange { vertex: usize, count: usize },

    #[error("moves must be distinct vertices (got {0} twice)")]
    SameVertex(usize),

    #[error("permutation length {found} does not match vertex count {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("size bound exceeded: {size} vertices, bound {bound}")]
    BoundExceeded { size: usize, bound: usize },

    #[error("generator {0} does not stabilize the game state")]
    NotStabilizing(usize),

    #[error("fixture index {0} out of range 1..=7")]
    NoSuchFixture(usize),

    #[error("invalid game state: {0}")]
    InvalidState(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("unsupported construction: {0}")]
    Unsupported(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("terminal position: no moves remain")]
    Terminal,

    #[error("strategy {name} not applicable: {reason}")]
    NotApplicable { name: String, reason: String },

    #[error("strategy {name} chose illegal move {vertex}")]
    IllegalMove { name: String, vertex: usize },

    #[error("certificate has no move for a reachable state ({0})")]
    CertificateMissing(String),

    #[error("nothing to certify: {0}")]
    NothingToCertify(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate piece `{0}`")]
    DuplicatePiece(String),

    #[error("unknown piece `{name}` in concurrency pair")]
    UnknownPieceInPair { name: String },

    #[error("unknown piece `{name}` at word position {position}")]
    UnknownLetter { name: String, position: usize },

    #[error("line {line}, column {column}: {message} (at `{token}`)")]
    Parse {
        line: usize,
        column: usize,
        token: String,
        message: String,
    },

    #[error("heaps belong to different concurrency structures")]
    StructureMismatch,

    #[error("vertex {vertex} out of range for heap with {len} vertices")]
    VertexOutOfRange { vertex: usize, len: usize },

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("structure is empty")]
    EmptyStructure,

    #[error("structure is not connected")]
    NotConnected,

    #[error("witness construction failed verification: {0}")]
    WitnessVerification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

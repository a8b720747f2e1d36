use thiserror::Error;

/// Errors raised by the library. Messages are stable; the CLI prints them verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero has no primitive direction")]
    ZeroVector,
    #[error("degenerate polygon")]
    DegeneratePolygon,
    #[error("slope multiset not closed")]
    SlopesNotClosed,
    #[error("mutation not admissible")]
    NotAdmissible,
    #[error("dual requires origin in P")]
    OriginNotInPolygon,
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid dimer model: {0}")]
    InvalidModel(String),
    #[error("degenerate dimer model")]
    NoMatchings,
    #[error("degenerate after reduction")]
    DegenerateAfterReduction,
    #[error("move: {0}")]
    Move(String),
    #[error("deformation data: {0}")]
    Deformation(String),
    #[error("restoration: {0}")]
    Restoration(String),
    #[error("mutation defined only at quadrangle faces")]
    NotQuadrangle,
    #[error("face mutation: {0}")]
    FaceMutation(String),
    #[error("deformation/mutation data inconsistent: {0}")]
    TableMismatch(String),
    #[error("verify: {0}")]
    Verify(String),
}

pub type Result<T> = std::result::Result<T, Error>;

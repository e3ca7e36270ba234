use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mixed scalar variants: exact and float values cannot be combined")]
    MixedScalar,
    #[error("exact arithmetic unavailable: {0}")]
    ExactUnavailable(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("support overlap: {0}")]
    SupportOverlap(String),
    #[error("point inside support: {0}")]
    InsideSupport(String),
    #[error("repeated points: {0}")]
    RepeatedPoints(String),
    #[error("partition outside box: {0}")]
    OutsideBox(String),
    #[error("degree cap exceeded: {degree} > {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("non-finite sample at index {index}")]
    NonFinite { index: u64 },
    #[error("degenerate basis: {0}")]
    Degenerate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal disagreement: {0}")]
    Disagreement(String),
}

pub type Result<T> = std::result::Result<T, Error>;

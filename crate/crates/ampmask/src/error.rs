use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),
    #[error("unknown axis `{0}`")]
    UnknownAxis(String),
    #[error("axis sets overlap: {0}")]
    OverlappingSets(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("refinement start is infeasible")]
    InfeasibleStart,
    #[error("region is empty")]
    EmptyRegion,
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("degenerate linear program: {0}")]
    DegenerateLp(String),
    #[error("input sequence is not typical")]
    AtypicalInput,
    #[error("no codeword covers the input sequence")]
    NoCover,
    #[error("unsupported format `{0}`")]
    UnsupportedFormat(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("negative entry: {0}")]
    NegativeEntry(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

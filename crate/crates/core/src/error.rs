use thiserror::Error;

#[derive(Debug, Error)]
pub enum EbcError {
    #[error("bit value outside {{0,1}}")]
    InvalidBit,
    #[error("invalid bit character '{0}'")]
    InvalidBitChar(char),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("position {position} out of range for length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("dimension {dim} exceeds exhaustive enumeration budget k <= {max}; supply a verified distance instead")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("generator rows are linearly dependent over GF(2)")]
    SingularGenerator,
    #[error("decoding radius {radius} exceeds (d-1)/2 = {unique_radius}; uniqueness not guaranteed")]
    RadiusTooLarge { radius: usize, unique_radius: usize },
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("not enough trials: need at least {min}, got {got}")]
    TooFewTrials { min: usize, got: usize },
    #[error("invalid quantum state: {0}")]
    InvalidState(String),
    #[error("malformed code file: {0}")]
    MalformedCodeFile(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

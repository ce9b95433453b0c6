use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("letter {0} is outside {{1,2,3}}")]
    InvalidLetter(u8),
    #[error("cannot parse `{0}`")]
    Parse(String),
    #[error("level {level} exceeds the configured cap {cap}")]
    LevelTooDeep { level: usize, cap: usize },
    #[error("address word length {len} exceeds level {level}")]
    AddressTooDeep { len: usize, level: usize },
    #[error("rho = {0} is outside (0,1)")]
    InvalidRho(f64),
    #[error("invalid sequence parameter: {0}")]
    InvalidSequence(String),
    #[error("explicit sequence has {len} terms, term {index} was requested")]
    SequenceExhausted { index: usize, len: usize },
    #[error("divergence of the rho series is undetermined after {0} terms")]
    Undetermined(usize),
    #[error("network is not connected")]
    NotConnected,
    #[error("infinite effective resistance between {0} and {1}")]
    InfiniteResistance(String, String),
    #[error("node {0} is not in the network")]
    UnknownNode(String),
    #[error("edge conductance must be positive and finite, got {0}")]
    BadConductance(f64),
    #[error("edge endpoints coincide at {0}")]
    SelfLoop(String),
    #[error("function has no value at {0}")]
    MissingValue(String),
    #[error("subdivision must be even and at least 2 for a tent, got {0}")]
    OddSubdivision(usize),
    #[error("subdivision must be at least 1")]
    ZeroSubdivision,
    #[error("depth mismatch: expected {expected}, found {found}")]
    DepthMismatch { expected: usize, found: usize },
    #[error("boundary is invalid: {0}")]
    InvalidBoundary(String),
    #[error("{0}")]
    OutOfRange(String),
    #[error("zero pivot while eliminating node {0}")]
    ZeroPivot(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("zero polynomial has no factorization")]
    ZeroPolynomial,

    #[error("polynomial must be monic with integer coefficients")]
    NotMonic,

    #[error("argument must be positive")]
    NonPositive,

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("level {level} exceeds the configured cap {cap}")]
    LevelTooLarge { level: u64, cap: u64 },

    #[error("series division by a series that vanishes to precision {0}")]
    SeriesDivisionByZero(i64),

    #[error("requested precision {requested} exceeds available precision {available}")]
    InsufficientPrecision { requested: i64, available: i64 },

    #[error("Hecke operators up to {bound} do not separate a subspace of dimension {dim}")]
    SeparationFailure { dim: usize, bound: u64 },

    #[error("Hecke data covers primes up to {have}, but {need} is required")]
    InsufficientRange { have: u64, need: u64 },

    #[error("twist matching failed: {0}")]
    TwistMatch(String),

    #[error("missing Hecke data: {0}")]
    MissingData(String),

    #[error("corrupted Weil data: {0}")]
    CorruptWeilData(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error at {path}: {message}")]
    Io { path: String, message: String },

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

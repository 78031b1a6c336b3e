use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed rational `{0}`")]
    Parse(String),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("{0} is not prime")]
    NotPrime(String),

    #[error("factorization of {value} exceeded the configured effort")]
    FactorEffort { value: String },

    #[error("sign undecidable by exact means (estimate {estimate:e} +/- {error_bound:e})")]
    Inconclusive { estimate: f64, error_bound: f64 },

    #[error("point lies on the divisor")]
    PointOnDivisor,

    #[error("undefined at this level: {0}")]
    UndefinedAtLevel(String),

    #[error("invalid blowup point: {0}")]
    InvalidBlowup(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

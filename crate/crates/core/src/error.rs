use thiserror::Error;

/// Domain errors raised by the library. The CLI maps every variant to exit code 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("undefined content: zero polynomial")]
    ZeroPolynomial,

    #[error("polynomial must be non-constant (degree >= 1)")]
    ConstantPolynomial,

    #[error("polynomial is not primitive (content {0})")]
    NotPrimitive(String),

    #[error("polynomial not square-free, c_f undefined here")]
    NotSquarefreePolynomial,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not square-free")]
    NotSquarefree(u64),

    #[error("argument must be positive (got {0})")]
    NonPositive(String),

    #[error("cutoff {cutoff} is below discriminant prime {prime}; use a cutoff of at least {prime}")]
    CutoffTooSmall { cutoff: u64, prime: String },

    #[error("value out of supported range: {0}")]
    OutOfRange(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("empty family: rejection budget of {budget} draws exhausted with {found} of {wanted} members")]
    EmptyFamily { budget: u64, found: usize, wanted: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

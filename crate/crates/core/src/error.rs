use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("root finder did not converge after {iterations} iterations (degree {degree}); the input is ill-conditioned, try a smaller order")]
    NonConvergence { degree: usize, iterations: usize },

    #[error("order N = {0} is too large; binomial coefficients are exact in binary64 only for N <= 16")]
    OrderTooLarge(usize),

    #[error("Bezout system is singular (pivot {pivot:e} at column {column}); P(x) and P(1-x) share a zero")]
    SingularSystem { column: usize, pivot: f64 },

    #[error("trigonometric polynomial is negative on the unit circle (min value {0:e})")]
    NegativeOnCircle(f64),

    #[error("symbol level {symbol} does not match sequence level {sequence}")]
    LevelMismatch { symbol: u32, sequence: u32 },

    #[error("power {power} exceeds multiplicity {multiplicity} of frequency {lambda}")]
    PowerExceedsMultiplicity { lambda: f64, power: u32, multiplicity: usize },

    #[error("length not divisible by 2^J: length {length}, J = {depth}")]
    BadLength { length: usize, depth: u32 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("ill-conditioned moment problem: {0}")]
    IllConditioned(String),
    #[error("index {index} out of range (max {max})")]
    OutOfRange { index: usize, max: usize },
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degree cap exceeded: {0}")]
    DegreeCap(String),
    #[error("leading coefficient of Q_{0} is singular")]
    SingularLeading(usize),
    #[error("eigenvalue condition fails at slot {slot}: {detail}")]
    ConditionFailed { slot: usize, detail: String },
    #[error("conjugation left a non-polynomial remainder (residual {0:e})")]
    NonPolynomialResult(f64),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("check error: {0}")]
    Check(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

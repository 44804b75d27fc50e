use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lambda must be positive (got {0})")]
    NonPositiveLambda(f64),

    #[error("{0} must be finite")]
    NonFinite(&'static str),

    #[error("potential is singular at r = {0}; r must be positive")]
    SingularPoint(f64),

    #[error("no interior potential minimum: {0}")]
    NoValley(String),

    #[error("seed functions have a pole at x0 = {0}; need |x0| < 1")]
    Pole(f64),

    #[error("series centers differ ({0} vs {1})")]
    CenterMismatch(f64, f64),

    #[error("division by a series whose constant term vanishes (pole at the center)")]
    PoleAtCenter,

    #[error("series exhausted: {0}")]
    SeriesExhausted(String),

    #[error("precision must be at least 16 digits (got {0})")]
    PrecisionTooLow(u32),

    #[error("angular momentum ell = {0} is not supported by the AIM engine (S-wave only)")]
    UnsupportedAngularMomentum(u32),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("matrix is not positive definite (pivot {index} = {pivot:e})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("malformed golden table data at line {line}: {msg}")]
    GoldenData { line: usize, msg: String },
}

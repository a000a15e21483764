use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate grid: lo = {lo}, hi = {hi}, n = {n} (need lo < hi and n >= {min_n})")]
    InvalidGrid { lo: f64, hi: f64, n: usize, min_n: usize },

    #[error("invalid physical parameters: {0}")]
    InvalidParams(String),

    #[error("non-positive density {rho} at x3 = {x}")]
    NonPositiveDensity { x: f64, rho: f64 },

    #[error("field radicand C - P - F(g rho) = {value} is not positive at x3 = {x}")]
    NegativeRadicand { x: f64, value: f64 },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("abscissae must be strictly increasing (row {row}: {prev} then {next})")]
    NonMonotoneAbscissa { row: usize, prev: f64, next: f64 },

    #[error("field strength vanishes somewhere on the grid (min m^2 = {min_m2})")]
    DegenerateField { min_m2: f64 },

    #[error("bisection failed: {0}")]
    BisectionFailure(String),

    #[error("zero denominator: {0}")]
    ZeroDenominator(&'static str),

    #[error("construction divides by xi1, which is zero")]
    ZeroXi1,

    #[error("construction divides by xi2, which is zero")]
    ZeroXi2,

    #[error("operation needs |xi|^2 > 0")]
    ZeroWavenumber,

    #[error("eigensolver failed: {0}")]
    EigenFailure(String),

    #[error("could not bracket the growth rate: {0}")]
    BracketFailure(String),

    #[error("zero vector")]
    ZeroVector,

    #[error("time step too large: amplitude grew at rate {rate:.3e} > 1/dt near t = {t:.4}")]
    StepTooLarge { t: f64, rate: f64 },

    #[error("invalid mode: {0}")]
    InvalidMode(String),

    #[error("insufficient data for growth fit: {got} usable samples, need {need}")]
    InsufficientData { got: usize, need: usize },

    #[error("amplitude is identically zero")]
    ZeroAmplitude,

    #[error("invalid scan spec: {0}")]
    InvalidSpec(String),

    #[error("configuration error at `{field}`: {msg}")]
    Config { field: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { field: field.into(), msg: msg.into() }
    }

    /// True for errors caused by bad input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidGrid { .. }
                | Error::InvalidParams(_)
                | Error::NonPositiveDensity { .. }
                | Error::Parse { .. }
                | Error::NonMonotoneAbscissa { .. }
                | Error::ZeroXi1
                | Error::ZeroXi2
                | Error::ZeroWavenumber
                | Error::InvalidMode(_)
                | Error::InvalidSpec(_)
                | Error::Config { .. }
                | Error::Io(_)
        )
    }
}

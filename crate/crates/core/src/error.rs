use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid bracket [{lo}, {hi}]: lower bound must be below upper bound")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("root finder did not converge after {0} iterations")]
    MaxIterations(usize),

    #[error("resonance not found: {0}")]
    RootNotFound(String),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("invalid combination: {0}")]
    InvalidCombination(String),

    #[error(
        "point-wise envelope vanishes on the sampling circle (|M| = {0:e}); winding undefined"
    )]
    DegenerateEnvelope(f64),

    #[error("unwrapped phase {total} rad is {deviation} rad away from a multiple of 2π")]
    WindingInconsistent { total: f64, deviation: f64 },

    #[error("zero norm: {0}")]
    ZeroNorm(String),

    #[error("no interior maximum in sampled profile")]
    NoInteriorMaximum,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("nonphysical index: {0}")]
    NonphysicalIndex(String),

    #[error("nonpositive result: {0}")]
    NonpositiveResult(String),

    #[error("empty catalog: {0}")]
    EmptyCatalog(String),

    #[error("channel not allowed (delta L = {0})")]
    DisallowedChannel(i64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Failures that come from the numerics (root finding, quadrature) rather
    /// than from bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoSignChange { .. }
                | Error::MaxIterations(_)
                | Error::RootNotFound(_)
                | Error::ZeroNorm(_)
                | Error::NoInteriorMaximum
                | Error::WindingInconsistent { .. }
                | Error::DegenerateEnvelope(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("detection probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("slow speed {0} is outside [0, 1]")]
    InvalidSpeed(f64),

    #[error("p = 0 and v = 0: the target can never be detected")]
    UnsolvableInstance,

    #[error("expansion ratio {a} must be below 1/(1-p) = {limit} for the fast strategy to converge")]
    DivergentFastRatio { a: f64, limit: f64 },

    #[error("expansion ratio {0} must be strictly greater than 1")]
    RatioNotAboveOne(f64),

    #[error("scout-ahead ratio {0} must lie in [0, 1] (and be 0 for non-hybrid strategies)")]
    InvalidScoutRatio(f64),

    #[error("slow speed is zero; the strategy needs v > 0")]
    SlowSpeedZero,

    #[error("target position {0} is not reached by the strategy")]
    NeverPassed(f64),

    #[error("expected detection time diverges: pass-time growth {growth} times miss probability {miss} is >= 1")]
    DivergentSeries { growth: f64, miss: f64 },

    #[error("no pass can ever detect the target (p = 0 and no slow pass)")]
    NoDetection,

    #[error("series truncation limit reached after {passes} passes without certifying the tail")]
    TruncationLimit { passes: usize },

    #[error("invalid target position {0}: must be finite and nonzero")]
    InvalidTarget(f64),

    #[error("invalid beta {beta} for v = {v}: need beta*v > 1 and a real discriminant")]
    InvalidBeta { v: f64, beta: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidProbability(_) => "InvalidProbability",
            Error::InvalidSpeed(_) => "InvalidSpeed",
            Error::UnsolvableInstance => "UnsolvableInstance",
            Error::DivergentFastRatio { .. } => "DivergentFastRatio",
            Error::RatioNotAboveOne(_) => "RatioNotAboveOne",
            Error::InvalidScoutRatio(_) => "InvalidScoutRatio",
            Error::SlowSpeedZero => "SlowSpeedZero",
            Error::NeverPassed(_) => "NeverPassed",
            Error::DivergentSeries { .. } => "DivergentSeries",
            Error::NoDetection => "NoDetection",
            Error::TruncationLimit { .. } => "TruncationLimit",
            Error::InvalidTarget(_) => "InvalidTarget",
            Error::InvalidBeta { .. } => "InvalidBeta",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

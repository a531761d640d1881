use thiserror::Error;

/// Errors shared by all library modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("critical point on orbit at step {0}")]
    CriticalOnOrbit(usize),
    #[error("map is not monotone on the core interval")]
    NotMonotoneOnCore,
    #[error("interval is degenerate at the working tolerance")]
    DegenerateInterval,
    #[error("inner interval is not nested in the outer one")]
    NotNested,
    #[error("no interior fixed point for this height")]
    NoFixedPoint,
    #[error("critical orbit does not return within horizon {0}")]
    NoReturn(usize),
    #[error("orbit does not enter the window within horizon {0}")]
    NoEntry(usize),
    #[error("critical orbit is not recurrent within the horizon")]
    NonRecurrent,
    #[error("no periodic point: no sign change ({0})")]
    NoPeriodicPoint(String),
    #[error("return map folds back over the window; renormalization suspected")]
    RenormalizationSuspected,
    #[error("sampled orbit converges to an attracting cycle of period {period}")]
    PeriodicAttractorSuspected { period: usize },
    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by the simulator, estimators and controllers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("action {0:?} is not a member of the scenario action set")]
    InvalidAction(crate::world::Action),
    #[error("rate model produced a non-finite value at ({x}, {y})")]
    Model { x: f64, y: f64 },
    #[error("estimator has no samples yet")]
    EstimatorNotReady,
    #[error("objective is not finite at the start point")]
    NonFiniteStart,
    #[error("integrand returned a non-finite value at s = {0}")]
    NonFiniteIntegrand(f64),
    #[error("bisection endpoints do not bracket a root: g({lo}) = {glo}, g({hi}) = {ghi}")]
    Bracketing { lo: f64, hi: f64, glo: f64, ghi: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("could not parse {what}: {message}")]
    Parse { what: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Whether the error stems from invalid input rather than a failure
    /// while running.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Parse { .. } | Error::InvalidAction(_))
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("unknown mode `{0}` (expected one of b0, b1, b2, p)")]
    UnknownMode(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step budget exhausted at t = {t}")]
    TooManySteps { t: f64 },
    #[error("non-finite amplitude or coefficient at t = {t}")]
    NonFinite { t: f64 },
    #[error("density matrix lost positivity at t = {t} (Cholesky of rho + {shift}*I failed)")]
    NotPositive { t: f64, shift: f64 },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("averaging window contains fewer than two output points")]
    EmptyWindow,
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(&'static str),
}

impl SimError {
    /// True for failures of the numerical evolution itself (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            SimError::StepUnderflow { .. }
                | SimError::TooManySteps { .. }
                | SimError::NonFinite { .. }
                | SimError::NotPositive { .. }
                | SimError::ZeroNorm
        )
    }
}

pub type Result<T> = std::result::Result<T, SimError>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SarxError>;

#[derive(Debug, Error)]
pub enum SarxError {
    #[error("sizing error: {0}")]
    Sizing(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("simulation became unstable at step {step}: |y| = {magnitude:e}")]
    Instability { step: usize, magnitude: f64 },

    #[error("degenerate regressor (zero norm)")]
    DegenerateRegressor,

    #[error("bound system is ill-conditioned (condition estimate {cond:e})")]
    IllConditioned { cond: f64 },

    #[error(
        "exact bound mode needs 2^{window} vertices, above the cap of 2^{cap}; use the monte-carlo bound mode instead"
    )]
    ExactModeTooLarge { window: usize, cap: usize },

    #[error("pole configuration is degenerate: {0}")]
    PoleDegeneracy(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SarxError {
    /// True for errors that come from floating-point conditioning rather than
    /// from bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            SarxError::Instability { .. }
                | SarxError::IllConditioned { .. }
                | SarxError::DegenerateRegressor
                | SarxError::PoleDegeneracy(_)
                | SarxError::Internal(_)
        )
    }
}

use thiserror::Error;

/// Errors raised by the market solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarketError {
    /// A scenario parameter failed validation.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// A price at or below zero was handed to the demand side.
    #[error("price must be strictly positive, got {0}")]
    NonPositivePrice(f64),

    /// Mobile users can only attach to macro-cells.
    #[error("mobile users unservable: total macro-cell capacity is zero")]
    MobileUnservable,

    /// Every tier has zero capacity.
    #[error("degenerate scenario: macro, small-cell and unlicensed capacities are all zero")]
    DegenerateScenario,

    /// A solver reached a state its preconditions rule out.
    #[error("internal consistency error: {0}")]
    Internal(String),

    /// The oracle iteration did not settle.
    #[error("oracle did not converge after {iterations} iterations (last step {last_step:e})")]
    OracleDiverged { iterations: usize, last_step: f64 },
}

impl MarketError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        MarketError::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors that indicate a solver defect rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            MarketError::Internal(_) | MarketError::OracleDiverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, MarketError>;

use hetnet_market::MarketError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad scenario or arguments.
    #[error("{0}")]
    Validation(String),
    /// A solver contradicted its own preconditions.
    #[error("{0}")]
    Internal(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<MarketError> for CliError {
    fn from(e: MarketError) -> Self {
        if e.is_internal() {
            CliError::Internal(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

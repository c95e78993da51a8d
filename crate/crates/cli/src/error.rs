use mv_entropy::Error;
use thiserror::Error as ThisError;

#[derive(Debug, Clone, PartialEq, ThisError)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("solver budget exceeded: {0}; rerun with --mode heuristic (or --mode auto) for a certified upper bound")]
    Budget(String),

    #[error("invalid isomorphism: {0}")]
    Isomorphism(String),

    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Isomorphism(_) => 5,
        }
    }

    /// Maps a library error raised while computing (not while loading).
    pub fn from_compute(err: Error) -> Self {
        match err {
            Error::BudgetExceeded { .. } => CliError::Budget(err.to_string()),
            Error::InvalidIsomorphism(_) => CliError::Isomorphism(err.to_string()),
            Error::ExactRequiresRational | Error::InvalidArgument(_) | Error::NotIdempotent => {
                CliError::Config(err.to_string())
            }
            other => CliError::Invariant(other.to_string()),
        }
    }

    /// Prefixes a loading error with the config field it came from.
    pub fn field(field: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{field}: {err}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

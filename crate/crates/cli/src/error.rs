use thiserror::Error;

/// Failure of a subcommand, split by the exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, preset or flag value.
    #[error("configuration error: {0}")]
    Config(String),
    /// Anything that goes wrong after the inputs were accepted.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parameter problems surface as configuration errors, the rest as runtime.
impl From<esdlab_core::Error> for CliError {
    fn from(e: esdlab_core::Error) -> Self {
        match e {
            esdlab_core::Error::Parameter { .. } => CliError::Config(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

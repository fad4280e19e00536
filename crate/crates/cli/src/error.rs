use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] carleson_core::Error),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),

    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),

    #[error("cannot write table: {0}")]
    Csv(#[from] csv::Error),

    /// The run completed but at least one acceptance check failed.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 1 acceptance failure, 2 configuration or precondition error, 3 numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_input_error() => 2,
            CliError::Core(_) => 3,
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Failed(_) => "acceptance_failure",
            CliError::Config(_) => "config",
            CliError::Core(e) if e.is_input_error() => "precondition",
            CliError::Core(_) => "numerical",
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => "output",
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

use thiserror::Error;

/// Failures of a CLI invocation, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Schema(String),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("scale limit exceeded: {0}")]
    ScaleLimit(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Other(_) => 1,
            CliError::Schema(_) => 2,
            CliError::MissingInput(_) => 3,
            CliError::ScaleLimit(_) => 4,
            CliError::Verification(_) => 5,
        }
    }
}

impl From<islab_core::Error> for CliError {
    fn from(e: islab_core::Error) -> Self {
        use islab_core::Error as E;
        match e {
            E::ScaleLimit(m) => CliError::ScaleLimit(m),
            E::IdentityViolated(_) => CliError::Verification(e.to_string()),
            E::Io(io) if io.kind() == std::io::ErrorKind::NotFound => {
                CliError::MissingInput(io.to_string())
            }
            E::Io(io) => CliError::Other(io.to_string()),
            other => CliError::Schema(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid program: {0}")]
    InvalidProgram(String),

    #[error("length mismatch: expected {expected}-bit strings, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("history outside environment support: {0}")]
    OutsideSupport(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("scale limit exceeded: {0}")]
    ScaleLimit(String),

    #[error("identity violated: {0}")]
    IdentityViolated(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

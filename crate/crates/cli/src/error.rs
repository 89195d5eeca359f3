use thiserror::Error;
use vinf_core::CoreError;
use vinf_exact::ExactError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Input(String),
    #[error("unknown {kind} {name:?}")]
    Unknown { kind: &'static str, name: String },
    #[error("no witness up to degree {0}; this is not a proof that none exists")]
    WitnessNotFound(u32),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        CliError::Core(CoreError::Exact(e))
    }
}

impl CliError {
    /// 1 for internal failures, 2 for anything caused by the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) | CliError::Core(CoreError::InternalMismatch(_)) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

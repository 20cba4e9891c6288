use compnet::CnError;
use thiserror::Error;

/// Failure categories, each with its own process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("numeric: {0}")]
    Numeric(String),
    #[error("io: {0}")]
    Io(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Numeric(_) => 2,
            HarnessError::Io(_) => 3,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }
}

impl From<CnError> for HarnessError {
    fn from(e: CnError) -> Self {
        if e.is_numeric() {
            HarnessError::Numeric(e.to_string())
        } else if matches!(e.root(), CnError::Io(_)) {
            HarnessError::Io(e.to_string())
        } else {
            HarnessError::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

use thiserror::Error;

/// A failed command. The variant decides the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or schema-invalid model file.
    #[error("{0}")]
    Input(String),
    /// The numerics failed on a valid input.
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 1,
        }
    }
}

impl From<nfpf_core::Error> for CliError {
    fn from(e: nfpf_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

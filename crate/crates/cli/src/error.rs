use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, missing inputs, malformed files.
    #[error("{0}")]
    Validation(String),
    /// The run started but could not complete.
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Core(#[from] specmel_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use specmel_core::Error as E;
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Core(E::Io { .. } | E::Divergence { .. }) => 2,
            CliError::Core(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gzavg_core::Error),
    #[error("bad input: {0}")]
    Input(String),
    #[error("identity violated: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 0 success, 1 internal mismatch, 2 bad input, 3 enumeration bound.
    pub fn exit_code(&self) -> u8 {
        use gzavg_core::Error as E;
        match self {
            CliError::Core(E::EnumerationBound(_) | E::SearchExhausted(_)) => 3,
            CliError::Core(E::InconsistentAuxiliary(_) | E::NotCuspidal) => 1,
            CliError::Core(_) | CliError::Input(_) => 2,
            CliError::Mismatch(_) | CliError::Io(_) => 1,
        }
    }
}

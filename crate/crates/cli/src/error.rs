use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] polycong_core::Error),
    #[error("{0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for unsupported or inadmissible input, 1 for
    /// resource limits and I/O.
    pub fn exit_code(&self) -> i32 {
        use polycong_core::Error as E;
        match self {
            CliError::Parse(_) | CliError::Core(E::InvalidArgument(_)) => 2,
            CliError::Core(E::Unsupported(_)) | CliError::Core(E::Inadmissible(_)) => 3,
            CliError::Core(E::ResourceLimit(_)) | CliError::Io(_) => 1,
        }
    }
}

pub fn missing(flag: &str) -> CliError {
    CliError::Parse(format!("--{flag} is required"))
}

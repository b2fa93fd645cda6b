use gpi_core::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 0 computed, 1 usage, 2 internal inconsistency, 3 resource guard, 4 unsupported.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                CoreError::Inconsistent(_) => 2,
                CoreError::ResourceGuard { .. } => 3,
                CoreError::Unsupported(_) => 4,
                _ => 1,
            },
        }
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tubal::Error),
    #[error("{0}")]
    Usage(String),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("frame {name} is {got:?} (h, w), expected {expected:?}")]
    FrameSizeMismatch {
        name: String,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for invalid input, 3 when the solver did not converge, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(tubal::Error::NotConverged(_)) => 3,
            CliError::Io(_) | CliError::Csv(_) | CliError::Core(tubal::Error::Io(_)) => 4,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

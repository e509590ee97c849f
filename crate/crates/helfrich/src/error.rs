use std::io;
use std::path::PathBuf;

use helfrich_core::Error as CoreError;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("stage {stage} failed: {source}")]
    Stage { stage: String, source: Box<CliError> },
    /// A computed value missed its tolerance.
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Format { path: path.into(), message: message.into() }
    }

    /// 0 success, 1 numerical failure, 2 usage or validation error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Format { .. } => 2,
            CliError::Check(_) => 1,
            CliError::Stage { source, .. } => source.exit_code(),
            CliError::Core(e) => match e {
                CoreError::InvalidParameters(_)
                | CoreError::NotCoprime { .. }
                | CoreError::OutOfScope(_)
                | CoreError::ParameterMismatch(_)
                | CoreError::SampleCountMismatch(..)
                | CoreError::InvalidMesh(_)
                | CoreError::TooCoarseLoop(_)
                | CoreError::OpenCurve
                | CoreError::UnstableStep { .. } => 2,
                _ => 1,
            },
        }
    }
}

/// Tags an error with the pipeline stage it came from.
pub trait StageExt<T> {
    fn stage(self, name: &str) -> Result<T>;
}

impl<T, E: Into<CliError>> StageExt<T> for std::result::Result<T, E> {
    fn stage(self, name: &str) -> Result<T> {
        self.map_err(|e| CliError::Stage { stage: name.to_string(), source: Box::new(e.into()) })
    }
}

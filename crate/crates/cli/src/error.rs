use gpequiv::GpError;

/// Everything a subcommand can fail with, mapped onto the documented exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Library(#[from] GpError),
    #[error("{failed} of {total} replicates failed to optimize ({rate:.1}% > 20%)", rate = 100.0 * *failed as f64 / *total as f64)]
    TooManyFailures { failed: usize, total: usize },
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Library(e) => match e {
                GpError::SingularGram { .. } => 3,
                GpError::AtomMismatch { .. } => 4,
                GpError::OptimizationFailed(_) => 5,
                GpError::Contract(_) | GpError::Geometry(_) | GpError::Domain(_) => 2,
            },
            CliError::TooManyFailures { .. } => 5,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

use std::path::PathBuf;

/// Failure classes of the command-line tool, one per exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The config file is missing, unparsable, or violates a config-level
    /// invariant (inconsistent dimensions, bad grids, capacity too small for
    /// the requested scales). Exit code 2.
    #[error("config error: {0}")]
    Config(String),

    /// A well-formed experiment hit a mathematical precondition while
    /// running (reducible system, point outside the support, capacity
    /// exhausted mid-survey, …). Carries the compute module's own message.
    /// Exit code 3.
    #[error("precondition failed: {0}")]
    Math(#[from] localpress::Error),

    /// Reading or writing a file failed for reasons unrelated to its
    /// content. Exit code 1.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Math(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

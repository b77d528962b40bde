use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Clean = 0,
    Io = 1,
    Config = 2,
    BlowUp = 3,
    /// A property suite reported a failing property.
    Failed = 4,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("corrupt snapshot {path}: {reason}")]
    CorruptSnapshot { path: PathBuf, reason: String },

    #[error("bad series {path}: {reason}")]
    Series { path: PathBuf, reason: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("blow-up: {0}")]
    BlowUp(dyrl_core::Error),

    #[error(transparent)]
    Core(#[from] dyrl_core::Error),

    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }

    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Config(_) => ExitStatus::Config,
            CliError::BlowUp(_) => ExitStatus::BlowUp,
            CliError::Failed(_) => ExitStatus::Failed,
            CliError::Core(dyrl_core::Error::InvalidConfig(_))
            | CliError::Core(dyrl_core::Error::EmptyRSet)
            | CliError::Core(dyrl_core::Error::InvalidSigma(_)) => ExitStatus::Config,
            _ => ExitStatus::Io,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

/// Process exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CERTIFICATION: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("surface file: {0}")]
    Csv(String),
    #[error("certification failed: {0}")]
    Certification(srg_bode::Error),
    #[error("analysis error: {0}")]
    Analysis(srg_bode::Error),
    #[error("validation found {0} bound violation(s)")]
    Validation(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Certification(_) => EXIT_CERTIFICATION,
            CliError::Validation(_) => EXIT_VALIDATION,
            _ => EXIT_USAGE,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<srg_bode::Error> for CliError {
    fn from(e: srg_bode::Error) -> Self {
        match e {
            srg_bode::Error::Certification(_) => CliError::Certification(e),
            other => CliError::Analysis(other),
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Accuracy(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Accuracy(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<cvtele_core::Error> for CliError {
    fn from(e: cvtele_core::Error) -> Self {
        use cvtele_core::Error as E;
        match e {
            E::Accuracy(_) => CliError::Accuracy(e.to_string()),
            E::Io { path, source } => CliError::Io { path, source },
            other => CliError::Usage(other.to_string()),
        }
    }
}

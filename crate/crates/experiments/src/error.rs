use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExpError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{method} diverged in single-trial mode")]
    Diverged { method: String },

    #[error(transparent)]
    Core(#[from] sdn_inverse::Error),

    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
}

impl ExpError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        ExpError::Config(msg.into())
    }

    /// Process exit code: 2 configuration, 3 numeric or divergence, 4 input/output.
    pub fn exit_code(&self) -> i32 {
        use sdn_inverse::Error as E;
        match self {
            ExpError::Config(_) => 2,
            ExpError::Diverged { .. } => 3,
            ExpError::File { .. } => 4,
            ExpError::Core(e) => match e {
                E::Io(_) | E::Parse { .. } => 4,
                E::Argument(_) | E::InvalidVertex { .. } | E::RangeTooSmall { .. } | E::EpochRange { .. } => 2,
                _ => 3,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, ExpError>;

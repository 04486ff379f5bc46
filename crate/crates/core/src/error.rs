use std::io;
use std::path::PathBuf;

use crate::model::Defect;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("failed to parse {path}: {message}")]
    Parse { path: String, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("empty series")]
    EmptySeries,

    #[error("non-finite value {value} at position {position}")]
    NonFinite { position: usize, value: f64 },

    #[error("snapshot has {} defect(s): {}", .0.len(), summarize(.0))]
    InvalidSnapshot(Vec<Defect>),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl std::fmt::Display, message: impl std::fmt::Display) -> Self {
        Error::Parse {
            path: path.to_string(),
            message: message.to_string(),
        }
    }

    /// True for failures caused by the filesystem rather than by content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

fn summarize(defects: &[Defect]) -> String {
    const SHOWN: usize = 5;
    let mut parts: Vec<String> = defects
        .iter()
        .take(SHOWN)
        .map(ToString::to_string)
        .collect();
    if defects.len() > SHOWN {
        parts.push(format!("... and {} more", defects.len() - SHOWN));
    }
    parts.join("; ")
}

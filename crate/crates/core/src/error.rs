//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by the model, pipeline and simulator layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input value lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model or pipeline parameter fails validation.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// Malformed textual input (config, trace, manifest, ratings CSV).
    #[error("parse error: {0}")]
    Parse(String),

    /// A plan could not be produced for a tile or viewport.
    #[error("planning error: {0}")]
    Plan(String),

    /// A manifest is incomplete, inconsistent or fails checksum verification.
    #[error("manifest error: {0}")]
    Manifest(String),

    /// A transcode job failed after retry; names the offending tile.
    #[error("transcode failed for {tile}: {reason}")]
    Transcode { tile: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

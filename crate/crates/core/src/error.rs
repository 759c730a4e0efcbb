use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("invalid URL {url:?}: {reason}")]
    InvalidUrl { url: String, reason: String },

    #[error("malformed CDX line {line:?}: {reason}")]
    MalformedCdx { line: String, reason: String },

    #[error("malformed link-format at byte {offset}: {reason}")]
    LinkFormat { offset: usize, reason: String },

    #[error("software {0:?} has no linked publications")]
    EmptyPublications(String),

    #[error("no capture falls within {0}")]
    NoCaptureInYear(i32),

    #[error("network error for {url}: {reason}")]
    Network { url: String, reason: String },

    #[error("backend error: {0}")]
    Backend(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("software {id}: {source}")]
    Software {
        id: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps this error with the id of the software being processed.
    pub fn for_software(self, id: &str) -> Self {
        Error::Software {
            id: id.to_string(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping software annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Software { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures to reach the archive at all (as opposed to bad input).
    pub fn is_backend_failure(&self) -> bool {
        matches!(self.root(), Error::Network { .. } | Error::Backend(_))
    }
}

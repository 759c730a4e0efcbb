use std::path::PathBuf;

use archivelink::Error as CoreError;
use thiserror::Error;

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_BACKEND: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("missing input {}: run the `{stage}` stage first", path.display())]
    MissingStageOutput { path: PathBuf, stage: &'static str },

    #[error("archive backend unreachable: {0}")]
    BackendUnreachable(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::MissingStageOutput { .. } => EXIT_INPUT,
            CliError::BackendUnreachable(_) => EXIT_BACKEND,
            CliError::Core(e) => match e.root() {
                CoreError::Io { .. } | CoreError::NotFound(_) => EXIT_IO,
                CoreError::Network { .. } | CoreError::Backend(_) => EXIT_BACKEND,
                _ => EXIT_INPUT,
            },
        }
    }
}

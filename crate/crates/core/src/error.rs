use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum OopsError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("trajectory has no actions: {0}")]
    MissingActions(String),

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("episode already finished")]
    EpisodeFinished,

    #[error("expert dataset is empty")]
    EmptyDataset,

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("config: {0}")]
    Config(String),

    #[error("training diverged: {0}")]
    Divergence(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, OopsError>;

impl OopsError {
    /// Process exit code for the CLI: 2 config, 3 data, 4 divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            OopsError::Config(_) => 2,
            OopsError::Divergence(_) => 4,
            _ => 3,
        }
    }
}

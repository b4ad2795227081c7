use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Everything wrong with an experiment, found before any run starts.
    #[error("invalid experiment:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error(transparent)]
    Core(#[from] slowpass::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("manifest: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 2,
            _ => 1,
        }
    }
}

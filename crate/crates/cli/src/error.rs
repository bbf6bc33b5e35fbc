use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// Invalid or unreadable configuration, or an unusable output location.
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] fofana_core::Error),

    #[error("{0}")]
    Io(String),

    /// Two summaries that cannot be compared.
    #[error("{0}")]
    Incompatible(String),
}

impl LabError {
    pub fn config(msg: impl Into<String>) -> Self {
        LabError::Config(msg.into())
    }
}

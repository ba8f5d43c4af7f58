use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("{0}")]
    Invalid(String),

    #[error("config {path}:{line}: {msg}")]
    Config { path: String, line: usize, msg: String },

    #[error(transparent)]
    Core(#[from] quench_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl SweepError {
    /// Process exit status: validation and runtime errors are 1; oracle
    /// failures are reported through [`crate::Outcome`] instead.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

pub type Result<T> = std::result::Result<T, SweepError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(SweepError::Invalid(msg.into()))
}

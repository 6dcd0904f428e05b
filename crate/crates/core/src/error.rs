use std::fmt;

/// Errors produced by sketches, generators and loaders.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("signature is undefined for an empty set")]
    EmptySet,

    /// The BSS row selected for a query has no nonzero cell.
    #[error("selected BSS row {row} is empty")]
    EmptyRow { row: usize },

    #[error("illegal stream: {0}")]
    IllegalStream(String),

    #[error("recovery query failed: {0}")]
    Recovery(#[from] RecoveryError),

    #[error("set {0} not found")]
    NotFound(u32),

    #[error("no banding parameters satisfy the constraint: {0}")]
    Infeasible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed blob: {0}")]
    Decode(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad parameters rather than bad data.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_) | Error::Infeasible(_) | Error::Unsupported(_)
        )
    }
}

/// Failure reported by a [`RecoveryProvider`](crate::sketch::RecoveryProvider).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryError {
    pub message: String,
}

impl RecoveryError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

impl fmt::Display for RecoveryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for RecoveryError {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

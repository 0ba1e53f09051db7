//! Shared error type.
//!
//! Three kinds of failure are distinguished because callers react
//! differently to each: `Validation` means the input data is rejected,
//! `Guard` means a computation was refused because its size exceeds a
//! configured enumeration bound, and `Internal` means a cross-check inside
//! the library failed (a bug, never the caller's fault).

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ZipError {
    /// Input data rejected, with the violated condition spelled out.
    #[error("validation: {0}")]
    Validation(String),
    /// Enumeration size above the configured guard.
    #[error("guard: {0}")]
    Guard(String),
    /// An internal cross-check failed; indicates a bug in this crate.
    #[error("internal consistency: {0}")]
    Internal(String),
}

impl ZipError {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            ZipError::Validation(_) => 1,
            ZipError::Guard(_) => 2,
            ZipError::Internal(_) => 3,
        }
    }
}

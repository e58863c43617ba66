// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Crate-wide error type.
///
/// `Validation` means the inputs violate a documented precondition;
/// `Numerical` means a solver failed to meet its advertised guarantee.
/// Callers that map errors to process exit codes rely on this split.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation: {0}")]
    Validation(String),
    #[error("numerical: {0}")]
    Numerical(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

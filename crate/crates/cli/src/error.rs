// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! CLI error type carrying the process exit code.

use std::fmt;

/// Exit codes: 0 success, 1 I/O, 2 validation, 3 numerical.
#[derive(Debug)]
pub enum CliError {
    /// Bad scenario input or command usage (exit 2).
    Validation(String),
    /// A solver failed to meet its guarantee (exit 3).
    Numerical(String),
    /// Filesystem or serialization failure (exit 1).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation: {m}"),
            CliError::Numerical(m) => write!(f, "numerical: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<entsim::Error> for CliError {
    fn from(e: entsim::Error) -> Self {
        match e {
            entsim::Error::Validation(m) => CliError::Validation(m),
            entsim::Error::Numerical(m) => CliError::Numerical(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<toml::de::Error> for CliError {
    fn from(e: toml::de::Error) -> Self {
        CliError::Validation(format!("scenario parse: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

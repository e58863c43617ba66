// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Scenario-driven front end for the `entsim` solvers.
//!
//! The library half exists so integration tests can drive scenario parsing,
//! rate construction and the command pipelines in-process; the `entsim`
//! binary is a thin argument-parsing shell around [`commands`].

pub mod commands;
pub mod error;
pub mod output;
pub mod quantity;
pub mod scenario;

pub use error::{CliError, Result};
pub use scenario::{BuiltRates, Scenario};

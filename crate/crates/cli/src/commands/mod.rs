// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command implementations. Each command takes a parsed [`Scenario`] and an
//! output directory, writes its CSV/JSON products there and prints a short
//! summary to stdout.

mod dispersion;
mod evolve;
mod field;
mod rates;
mod sweep;
mod validate;

pub use dispersion::run_dispersion;
pub use evolve::run_evolve;
pub use field::run_field;
pub use rates::run_rates;
pub use sweep::{run_sweep, SweepOptions};
pub use validate::run_validate;

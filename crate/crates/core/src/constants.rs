// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Physical constants (SI, CODATA 2022).

/// Speed of light in vacuum (m/s, exact).
pub const C0: f64 = 299_792_458.0;

/// Vacuum permittivity (F/m).
pub const EPS0: f64 = 8.854_187_818_8e-12;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817_646_156_5e-34;

/// One debye in C m (1e-21 / c).
pub const DEBYE: f64 = 1e-21 / C0;

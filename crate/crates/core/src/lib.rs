// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dissipative dynamics of qubit pairs coupled through a nonreciprocal
//! plasmonic environment.
//!
//! The crate is organised as a pipeline:
//!
//! * [`materials`] evaluates the gyrotropic permittivity of a magnetised
//!   plasma and derived bulk wavenumbers.
//! * [`greens2d`] solves the two-dimensional half-space scattering problem
//!   (surface-wave poles, Sommerfeld integrals, emitter rate profiles).
//! * [`coupling`] turns field solutions or parametrised models into the
//!   dissipative and coherent two-qubit coupling rates.
//! * [`dynamics`] integrates the resulting master equation and provides
//!   closed-form references for special cases.
//! * [`entanglement`] computes concurrence for the evolved states.
//!
//! All frequencies are angular (rad/s) and all lengths are metres unless a
//! name says otherwise. Quantities named `*_tilde` are normalized by the
//! single-qubit decay rate `Gamma11`.

pub mod constants;
pub mod coupling;
pub mod dynamics;
pub mod entanglement;
mod error;
pub mod greens2d;
pub mod linalg;
pub mod materials;

pub use coupling::{ChiralParams, CouplingRates, GreenSample, Plasmonic1dRates, Qubit, RwaReport};
pub use dynamics::{
    DensityMatrix, DriveParams, EvolutionConfig, Generator, Method, Trajectory,
};
pub use entanglement::{ConcurrenceTrace, TraceSource};
pub use error::{Error, Result};
pub use greens2d::{FieldProfile, InterfaceGeometry, RatesProfile, SppPole};
pub use materials::{OpaqueMedium, PermittivityTensor, PlasmaParams};

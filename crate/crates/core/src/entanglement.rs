// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Wootters concurrence and closed-form concurrence curves.
//!
//! The spin-flip operation uses `sigma_y (x) sigma_y` expressed in the
//! two-qubit basis `|1> = g1 g2`, `|2> = e1 e2`, `|3> = g1 e2`,
//! `|4> = e1 g2`:
//!
//! ```text
//!          |  0 -1  0  0 |
//!  Y (x) Y | -1  0  0  0 |
//!        = |  0  0  0  1 |
//!          |  0  0  1  0 |
//! ```
//!
//! Basis-order mistakes are the classic failure in this computation, so the
//! matrix is fixed here once and pinned by tests against states with known
//! concurrence.

use ndarray::Array2;
use num_complex::Complex64;

use crate::dynamics::{DensityMatrix, Trajectory};
use crate::error::{Error, Result};
use crate::linalg;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Spin flip `sigma_y (x) sigma_y` in the permuted basis (see module docs).
fn spin_flip() -> Array2<Complex64> {
    let mut m = Array2::zeros((4, 4));
    m[[0, 1]] = c(-1.0, 0.0);
    m[[1, 0]] = c(-1.0, 0.0);
    m[[2, 3]] = c(1.0, 0.0);
    m[[3, 2]] = c(1.0, 0.0);
    m
}

/// Wootters concurrence `max(0, sqrt(u1) - sqrt(u2) - sqrt(u3) - sqrt(u4))`
/// with `u_i` the descending eigenvalues of `rho (Y(x)Y) rho* (Y(x)Y)`.
///
/// The product has a real nonnegative spectrum in exact arithmetic; small
/// negative eigenvalues from round-off are clipped, anything below -1e-6 or
/// with an imaginary part above 1e-9 is reported as an error. Eigenvalues
/// below 1e-12 of the largest are treated as exact zeros: the square root
/// of an eigenvalue that is only round-off would otherwise contaminate the
/// result at the 1e-8 level.
pub fn wootters(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::validation("concurrence: defined for two qubits (4x4)"));
    }
    let yy = spin_flip();
    let conj = rho.matrix().mapv(|z| z.conj());
    let flipped = yy.dot(&conj).dot(&yy);
    let prod = rho.matrix().dot(&flipped);
    let eigs = linalg::eigvals(&prod.view())?;
    let mut us = [0.0f64; 4];
    for (u, z) in us.iter_mut().zip(&eigs) {
        if z.im.abs() > 1e-9 {
            return Err(Error::numerical(format!(
                "concurrence: eigenvalue {} of rho rho~ is not real",
                z
            )));
        }
        if z.re < -1e-6 {
            return Err(Error::numerical(format!(
                "concurrence: eigenvalue {:.3e} of rho rho~ is negative",
                z.re
            )));
        }
        *u = z.re.max(0.0);
    }
    let floor = 1e-12 * us.iter().fold(0.0f64, |m, u| m.max(*u));
    for u in us.iter_mut() {
        if *u < floor {
            *u = 0.0;
        }
    }
    us.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let s: Vec<f64> = us.iter().map(|u| u.sqrt()).collect();
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// Concurrence after purely forward coupling, starting from one excited
/// qubit: `C(t) = 2 sqrt(Gamma21^2/4 + g21^2) t e^{-Gamma11 t}`.
pub fn concurrence_unidir(t: f64, gamma11: f64, gamma21: f64, g21: f64) -> Result<f64> {
    if !(gamma11 > 0.0) || !gamma11.is_finite() || !gamma21.is_finite() || !g21.is_finite() {
        return Err(Error::validation(
            "concurrence: gamma11 must be positive and rates finite",
        ));
    }
    if !(t >= 0.0) {
        return Err(Error::validation("concurrence: t must be >= 0"));
    }
    let q = (0.25 * gamma21 * gamma21 + g21 * g21).sqrt();
    Ok(2.0 * q * t * (-gamma11 * t).exp())
}

/// Peak of [`concurrence_unidir`], reached at `t = 1/Gamma11`.
pub fn max_concurrence_unidir(gamma11: f64, gamma21: f64, g21: f64) -> Result<f64> {
    concurrence_unidir(1.0 / gamma11, gamma11, gamma21, g21)
}

/// Concurrence for identical qubits coupled through a reciprocal channel
/// (symmetric rates), starting from one excited qubit:
///
/// ```text
/// C(t) = { 1/4 [e^{-(G+G12) t} - e^{-(G-G12) t}]^2
///        + e^{-2 G t} sin^2(2 g12 t) }^{1/2},   G = Gamma11
/// ```
pub fn concurrence_recip(t: f64, gamma11: f64, gamma12: f64, g12: f64) -> Result<f64> {
    if !(gamma11 > 0.0) || !gamma11.is_finite() || !gamma12.is_finite() || !g12.is_finite() {
        return Err(Error::validation(
            "concurrence: gamma11 must be positive and rates finite",
        ));
    }
    // The subradiant rate Gamma11 - Gamma12 must stay nonnegative.
    if gamma12 > gamma11 {
        return Err(Error::validation(
            "concurrence: requires gamma12 <= gamma11",
        ));
    }
    if !(t >= 0.0) {
        return Err(Error::validation("concurrence: t must be >= 0"));
    }
    let sup = (-(gamma11 + gamma12) * t).exp();
    let sub = (-(gamma11 - gamma12) * t).exp();
    let osc = (2.0 * g12 * t).sin();
    Ok((0.25 * (sup - sub).powi(2) + (-2.0 * gamma11 * t).exp() * osc * osc).sqrt())
}

/// Concurrence for the 1D surface-wave channel with forward coupling only:
/// `C(t) = 2 beta21 Gamma11 e^{-k'' |separation|} t e^{-Gamma11 t}`. The
/// real part of the propagation constant drops out of the quadrature sum,
/// so only the attenuation `k''` enters.
pub fn concurrence_1d(t: f64, beta21: f64, gamma11: f64, k_dblprime: f64, separation: f64) -> f64 {
    2.0 * beta21 * gamma11 * (-k_dblprime * separation.abs()).exp() * t * (-gamma11 * t).exp()
}

/// Label for where a concurrence curve came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSource {
    WoottersOnTrajectory,
    AnalyticUnidir,
    AnalyticRecip,
    Analytic1d,
}

impl TraceSource {
    /// Stable tag used in serialized output.
    pub fn tag(&self) -> &'static str {
        match self {
            TraceSource::WoottersOnTrajectory => "wootters_on_trajectory",
            TraceSource::AnalyticUnidir => "analytic_unidir",
            TraceSource::AnalyticRecip => "analytic_recip",
            TraceSource::Analytic1d => "analytic_1d",
        }
    }
}

/// Concurrence time series with its provenance tag.
#[derive(Debug, Clone)]
pub struct ConcurrenceTrace {
    /// Sample times (s).
    pub t: Vec<f64>,
    /// Concurrence values, each in `[0, 1]` up to round-off.
    pub c: Vec<f64>,
    pub source: TraceSource,
}

impl ConcurrenceTrace {
    pub fn new(t: Vec<f64>, c: Vec<f64>, source: TraceSource) -> Result<Self> {
        if t.len() != c.len() {
            return Err(Error::validation(
                "concurrence trace: time and value arrays differ in length",
            ));
        }
        for (tt, cc) in t.iter().zip(&c) {
            if !tt.is_finite() || !cc.is_finite() {
                return Err(Error::validation("concurrence trace: entries must be finite"));
            }
            if *cc < 0.0 || *cc > 1.0 + 1e-9 {
                return Err(Error::validation(format!(
                    "concurrence trace: value {} at t = {} outside [0, 1]",
                    cc, tt
                )));
            }
        }
        Ok(ConcurrenceTrace { t, c, source })
    }

    /// Wootters concurrence evaluated at every recorded sample.
    pub fn from_trajectory(traj: &Trajectory) -> Result<Self> {
        let mut cvals = Vec::with_capacity(traj.states.len());
        for state in &traj.states {
            cvals.push(wootters(state)?);
        }
        Self::new(traj.times.clone(), cvals, TraceSource::WoottersOnTrajectory)
    }

    /// Sample with the largest concurrence, `None` for an empty trace.
    pub fn max_point(&self) -> Option<(f64, f64)> {
        self.t
            .iter()
            .zip(&self.c)
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite values"))
            .map(|(t, c)| (*t, *c))
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

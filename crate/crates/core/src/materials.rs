// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Gyrotropic permittivity of a magnetised cold plasma.
//!
//! The static bias field points along z, so the tensor couples the x and y
//! components and leaves z decoupled. TM-polarised propagation in the x-y
//! plane sees the effective scalar `eps_eff`, TE sees `e33`.

use ndarray::{array, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

/// Drude plasma with cyclotron bias. All rates angular (rad/s).
///
/// `omega_c` carries the sign of the bias field; `omega_c = 0` is the
/// reciprocal (unbiased) limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasmaParams {
    pub omega_p: f64,
    pub omega_c: f64,
    pub nu: f64,
}

impl PlasmaParams {
    pub fn new(omega_p: f64, omega_c: f64, nu: f64) -> Result<Self> {
        let p = PlasmaParams { omega_p, omega_c, nu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_p > 0.0) || !self.omega_p.is_finite() {
            return Err(Error::validation("plasma: omega_p must be positive"));
        }
        if self.nu < 0.0 || !self.nu.is_finite() {
            return Err(Error::validation("plasma: nu must be non-negative"));
        }
        if !self.omega_c.is_finite() {
            return Err(Error::validation("plasma: omega_c must be finite"));
        }
        Ok(())
    }
}

/// Isotropic lower half-space backing the plasma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpaqueMedium {
    pub eps: Complex64,
}

impl OpaqueMedium {
    pub fn validate(&self) -> Result<()> {
        if self.eps.im < 0.0 {
            return Err(Error::validation("opaque medium: Im(eps) must be >= 0"));
        }
        if self.eps.norm() == 0.0 {
            return Err(Error::validation("opaque medium: eps must be nonzero"));
        }
        Ok(())
    }
}

/// Permittivity components at one frequency.
///
/// The full tensor is `[[e11, i e12, 0], [-i e12, e11, 0], [0, 0, e33]]`;
/// `e12` is real for a lossless plasma and the tensor is then Hermitian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermittivityTensor {
    pub e11: Complex64,
    pub e12: Complex64,
    pub e33: Complex64,
}

impl PermittivityTensor {
    /// Full 3x3 tensor.
    pub fn matrix(&self) -> Array2<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        array![
            [self.e11, i * self.e12, zero],
            [-i * self.e12, self.e11, zero],
            [zero, zero, self.e33],
        ]
    }

    /// TM effective permittivity `(e11^2 - e12^2) / e11`.
    pub fn eps_eff(&self) -> Result<Complex64> {
        if self.e11.norm() < 1e-12 {
            return Err(Error::numerical(
                "eps_eff singular: e11 vanishes at this frequency",
            ));
        }
        Ok((self.e11 * self.e11 - self.e12 * self.e12) / self.e11)
    }
}

/// Evaluate the plasma tensor at angular frequency `omega`.
pub fn permittivity(plasma: &PlasmaParams, omega: f64) -> Result<PermittivityTensor> {
    plasma.validate()?;
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::validation("permittivity: omega must be positive"));
    }
    let i = Complex64::new(0.0, 1.0);
    let wp2 = plasma.omega_p * plasma.omega_p;
    let q = Complex64::new(plasma.nu, -omega);
    let den = q * q + plasma.omega_c * plasma.omega_c;
    if den.norm() < 1e-12 * omega * omega {
        return Err(Error::validation(
            "permittivity: cyclotron resonance, (nu - i omega)^2 + omega_c^2 ~ 0",
        ));
    }
    let e11 = 1.0 + i * (wp2 / omega) * q / den;
    let e12 = Complex64::new(wp2 * plasma.omega_c / omega, 0.0) / den;
    let e33 = 1.0 + i * wp2 / (omega * q);
    Ok(PermittivityTensor { e11, e12, e33 })
}

/// Square root with the branch fixed so that `Im >= 0`, and `Re >= 0` on the
/// real axis. Propagating solutions decay (or stay bounded) as exp(i k x)
/// with x > 0 under this choice.
pub fn im_pos_sqrt(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.im < 0.0 || (r.im == 0.0 && r.re < 0.0) {
        -r
    } else {
        r
    }
}

/// Bulk wavenumbers `(k_te, k_tm)` for in-plane propagation at `omega`.
///
/// `k_te^2 = e33 k0^2`, `k_tm^2 = eps_eff k0^2`; evanescent bands come out
/// positive imaginary.
pub fn bulk_wavenumbers(plasma: &PlasmaParams, omega: f64) -> Result<(Complex64, Complex64)> {
    let t = permittivity(plasma, omega)?;
    let k0 = omega / crate::constants::C0;
    let k_te = im_pos_sqrt(t.e33) * k0;
    let k_tm = im_pos_sqrt(t.eps_eff()?) * k0;
    Ok((k_te, k_tm))
}

/// Result of the passive-medium test on a permittivity tensor.
#[derive(Debug, Clone, Copy)]
pub struct PassivityReport {
    pub passive: bool,
    /// Smallest eigenvalue of the absorption part (M - M^dag) / 2i.
    pub min_eigenvalue: f64,
}

/// Check that the tensor describes a passive medium: the anti-Hermitian part
/// divided by i must be positive semidefinite (within 1e-12).
pub fn passivity_check(t: &PermittivityTensor) -> Result<PassivityReport> {
    let m = t.matrix();
    let mdag = linalg::adjoint(&m.view());
    let half_i = Complex64::new(0.0, -0.5);
    let absorb = (&m - &mdag).mapv(|z| z * half_i);
    let eigs = linalg::eigvalsh(&absorb.view())?;
    let min_eigenvalue = eigs.into_iter().fold(f64::INFINITY, f64::min);
    Ok(PassivityReport {
        passive: min_eigenvalue >= -1e-12,
        min_eigenvalue,
    })
}

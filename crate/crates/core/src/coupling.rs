// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dissipative (`Gamma_ij`) and coherent (`g_ij`) two-qubit coupling rates.
//!
//! Rates can be built three ways: from sampled Green tensors, from the
//! parametrised 1D surface-wave model, or from normalized 2D field profiles
//! plus an absolute self rate. The chiral mapping converts between the rate
//! matrices and waveguide-style parameters (decay per direction plus a
//! propagation phase).

use ndarray::Array2;
use num_complex::Complex64;

use crate::constants::{C0, EPS0, HBAR};
use crate::error::{Error, Result};

/// Point emitter with a real transition dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qubit {
    /// Position (m).
    pub position: [f64; 3],
    /// Transition dipole moment (C m).
    pub dipole: [f64; 3],
    /// Transition angular frequency (rad/s).
    pub transition_omega0: f64,
}

impl Qubit {
    pub fn validate(&self) -> Result<()> {
        let d2: f64 = self.dipole.iter().map(|d| d * d).sum();
        if !(d2 > 0.0) || !d2.is_finite() || self.position.iter().any(|p| !p.is_finite()) {
            return Err(Error::validation("qubit: dipole must be finite and nonzero"));
        }
        if !(self.transition_omega0 > 0.0) || !self.transition_omega0.is_finite() {
            return Err(Error::validation("qubit: transition frequency must be positive"));
        }
        Ok(())
    }
}

/// One sampled Green tensor between qubit positions, 3x3 in 1/m.
#[derive(Debug, Clone)]
pub struct GreenSample {
    pub i: usize,
    pub j: usize,
    /// Sample frequency (rad/s).
    pub omega: f64,
    pub g: Array2<Complex64>,
}

impl GreenSample {
    pub fn validate(&self) -> Result<()> {
        if self.g.dim() != (3, 3) {
            return Err(Error::validation("green sample: tensor must be 3x3"));
        }
        if self.g.iter().any(|v| !v.is_finite()) || !self.omega.is_finite() {
            return Err(Error::validation("green sample: entries must be finite"));
        }
        Ok(())
    }
}

/// N x N rate matrices; no symmetry is imposed, `gamma[[i, j]]` and
/// `gamma[[j, i]]` differ in a nonreciprocal environment.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingRates {
    /// Dissipative rates (rad/s).
    pub gamma: Array2<f64>,
    /// Coherent couplings (rad/s).
    pub g: Array2<f64>,
}

impl CouplingRates {
    pub fn new(gamma: Array2<f64>, g: Array2<f64>) -> Result<Self> {
        let r = CouplingRates { gamma, g };
        r.validate()?;
        Ok(r)
    }

    pub fn two_qubit(gamma: [[f64; 2]; 2], g: [[f64; 2]; 2]) -> Result<Self> {
        let flat = |m: [[f64; 2]; 2]| {
            Array2::from_shape_vec((2, 2), vec![m[0][0], m[0][1], m[1][0], m[1][1]])
                .expect("2x2 shape")
        };
        Self::new(flat(gamma), flat(g))
    }

    pub fn n(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let (r, c) = self.gamma.dim();
        if r != c || self.g.dim() != (r, c) || r == 0 {
            return Err(Error::validation(
                "coupling rates: gamma and g must be square and of equal size",
            ));
        }
        if self.gamma.iter().chain(self.g.iter()).any(|v| !v.is_finite()) {
            return Err(Error::validation("coupling rates: entries must be finite"));
        }
        for i in 0..r {
            if !(self.gamma[[i, i]] > 0.0) {
                return Err(Error::validation(
                    "coupling rates: diagonal decay rates must be positive",
                ));
            }
        }
        Ok(())
    }
}

/// Waveguide-style parameters: independent decay into the right- and
/// left-going channels plus a propagation phase per direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiralParams {
    /// Decay rate into right-going modes (rad/s).
    pub gamma_r: f64,
    /// Decay rate into left-going modes (rad/s).
    pub gamma_l: f64,
    /// Right-going propagation constant (rad/m).
    pub k_r: f64,
    /// Left-going propagation constant (rad/m).
    pub k_l: f64,
    pub x1: f64,
    pub x2: f64,
}

impl ChiralParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_r >= 0.0 && self.gamma_l >= 0.0)
            || !self.gamma_r.is_finite()
            || !self.gamma_l.is_finite()
        {
            return Err(Error::validation("chiral params: decay rates must be >= 0"));
        }
        if !(self.x2 > self.x1) {
            return Err(Error::validation("chiral params: requires x2 > x1"));
        }
        if !self.k_r.is_finite() || !self.k_l.is_finite() {
            return Err(Error::validation("chiral params: wavenumbers must be finite"));
        }
        Ok(())
    }
}

/// 1D surface-wave rates plus the share of the self rate carried by the
/// surface wave itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Plasmonic1dRates {
    pub rates: CouplingRates,
    /// Surface-wave part of the self rate, `(beta12 + beta21) * gamma11`.
    /// The limit of the cross rate at zero separation is twice this, so the
    /// surface-wave rate is discontinuous at coinciding positions.
    pub gamma_spp_share: f64,
}

/// Validity report for the rotating-wave treatment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaReport {
    pub ok: bool,
    /// max_i Gamma_ii / omega0.
    pub max_ratio: f64,
    pub threshold: f64,
}

pub const RWA_THRESHOLD: f64 = 1e-3;

/// Rates from sampled Green tensors:
/// `Gamma_ij = (2 w0^2 / eps0 hbar c^2) d_i . Im G(r_i, r_j, w0) . d_j` and
/// `g_ij = (w0^2 / eps0 hbar c^2) d_i . Re G . d_j`.
pub fn rates_from_green(qubits: &[Qubit], samples: &[GreenSample]) -> Result<CouplingRates> {
    if qubits.is_empty() {
        return Err(Error::validation("green rates: need at least one qubit"));
    }
    for q in qubits {
        q.validate()?;
    }
    let w0 = qubits[0].transition_omega0;
    if qubits.iter().any(|q| (q.transition_omega0 - w0).abs() > 1e-9 * w0) {
        return Err(Error::validation(
            "green rates: qubits must share one transition frequency",
        ));
    }
    let n = qubits.len();
    let pref = w0 * w0 / (EPS0 * HBAR * C0 * C0);
    let mut gamma = Array2::zeros((n, n));
    let mut g = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let s = samples
                .iter()
                .find(|s| s.i == i && s.j == j && (s.omega - w0).abs() <= 1e-6 * w0)
                .ok_or_else(|| {
                    Error::validation(format!(
                        "green rates: no sample for pair ({i}, {j}) at the transition frequency"
                    ))
                })?;
            s.validate()?;
            let (di, dj) = (qubits[i].dipole, qubits[j].dipole);
            let mut re = 0.0;
            let mut im = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    re += di[a] * s.g[[a, b]].re * dj[b];
                    im += di[a] * s.g[[a, b]].im * dj[b];
                }
            }
            gamma[[i, j]] = 2.0 * pref * im;
            g[[i, j]] = pref * re;
        }
    }
    for i in 0..n {
        if !(gamma[[i, i]] > 0.0) {
            return Err(Error::validation(format!(
                "green rates: qubit {i} self rate is not positive (passivity violation)"
            )));
        }
    }
    CouplingRates::new(gamma, g)
}

/// Two-qubit rates of the 1D surface-wave channel. `beta12` and `beta21`
/// are the fractions of the given total self rate `gamma11` emitted into the
/// left- and right-going surface wave; `k_right` and `k_left` are the complex
/// propagation constants (attenuation in the imaginary part). Requires
/// `x2 >= x1`.
pub fn plasmonic_1d_rates(
    beta12: f64,
    beta21: f64,
    gamma11: f64,
    k_right: Complex64,
    k_left: Complex64,
    x1: f64,
    x2: f64,
) -> Result<Plasmonic1dRates> {
    if !(beta12 >= 0.0 && beta21 >= 0.0 && beta12 + beta21 <= 1.0 + 1e-12) {
        return Err(Error::validation(
            "1d rates: betas must be nonnegative with beta12 + beta21 <= 1",
        ));
    }
    if !(gamma11 > 0.0) || !gamma11.is_finite() {
        return Err(Error::validation("1d rates: gamma11 must be positive"));
    }
    if !(x2 >= x1) {
        return Err(Error::validation("1d rates: requires x2 >= x1"));
    }
    if k_right.im < 0.0 || k_left.im < 0.0 || !k_right.is_finite() || !k_left.is_finite() {
        return Err(Error::validation(
            "1d rates: attenuation Im(k) must be nonnegative",
        ));
    }
    // Signed separation keeps the odd symmetry of the coherent part.
    let pair = |beta: f64, k: Complex64, dx: f64| {
        let att = (-k.im * dx.abs()).exp();
        (
            2.0 * beta * gamma11 * att * (k.re * dx).cos(),
            beta * gamma11 * att * (k.re * dx).sin(),
        )
    };
    let (gamma21, g21) = pair(beta21, k_right, x2 - x1);
    let (gamma12, g12) = pair(beta12, k_left, x1 - x2);
    Ok(Plasmonic1dRates {
        rates: CouplingRates::two_qubit(
            [[gamma11, gamma12], [gamma21, gamma11]],
            [[0.0, g12], [g21, 0.0]],
        )?,
        gamma_spp_share: (beta12 + beta21) * gamma11,
    })
}

/// Two-qubit rates from normalized field ratios and an absolute self rate.
pub fn rates_from_normalized(
    gamma11: f64,
    gamma_tilde_21: f64,
    g_tilde_21: f64,
    gamma_tilde_12: f64,
    g_tilde_12: f64,
) -> Result<CouplingRates> {
    if !(gamma11 > 0.0) || !gamma11.is_finite() {
        return Err(Error::validation("normalized rates: gamma11 must be positive"));
    }
    CouplingRates::two_qubit(
        [
            [gamma11, gamma_tilde_12 * gamma11],
            [gamma_tilde_21 * gamma11, gamma11],
        ],
        [[0.0, g_tilde_12 * gamma11], [g_tilde_21 * gamma11, 0.0]],
    )
}

/// Rate matrices of the chiral parametrisation:
/// `Gamma_jj = gamma_R + gamma_L`, `Gamma_21 = 2 gamma_R cos(k_R dx)`,
/// `g_21 = gamma_R sin(k_R dx)`, and the left-going pair with `-dx`.
pub fn chiral_to_rates(c: &ChiralParams) -> Result<CouplingRates> {
    c.validate()?;
    let dx = c.x2 - c.x1;
    let gjj = c.gamma_r + c.gamma_l;
    if !(gjj > 0.0) {
        return Err(Error::validation(
            "chiral params: at least one direction must have nonzero decay",
        ));
    }
    CouplingRates::two_qubit(
        [
            [gjj, 2.0 * c.gamma_l * (c.k_l * dx).cos()],
            [2.0 * c.gamma_r * (c.k_r * dx).cos(), gjj],
        ],
        [
            [0.0, -c.gamma_l * (c.k_l * dx).sin()],
            [c.gamma_r * (c.k_r * dx).sin(), 0.0],
        ],
    )
}

/// Invert [`chiral_to_rates`]: `gamma_R = |Gamma_21/2 + i g_21|` with the
/// phase `k_R (x2 - x1) = arg(Gamma_21/2 + i g_21)` reported as a principal
/// value in `[0, 2 pi)`; the left channel uses the opposite phase sign.
/// The 2 pi phase ambiguity is inherent to the assignment.
pub fn rates_to_chiral(r: &CouplingRates, x1: f64, x2: f64) -> Result<ChiralParams> {
    r.validate()?;
    if r.n() != 2 {
        return Err(Error::validation("chiral mapping: requires exactly two qubits"));
    }
    if !(x2 > x1) {
        return Err(Error::validation("chiral mapping: requires x2 > x1"));
    }
    let scale = r.gamma[[0, 0]];
    if (r.gamma[[0, 0]] - r.gamma[[1, 1]]).abs() > 1e-9 * scale {
        return Err(Error::validation(
            "chiral mapping: requires equal self rates on both qubits",
        ));
    }
    let dx = x2 - x1;
    let v_r = Complex64::new(r.gamma[[1, 0]] / 2.0, r.g[[1, 0]]);
    let v_l = Complex64::new(r.gamma[[0, 1]] / 2.0, r.g[[0, 1]]);
    let gamma_r = v_r.norm();
    let gamma_l = v_l.norm();
    // A vanishing channel leaves its phase undefined; that is fine only if
    // the self rate says the channel really is dark.
    if gamma_r < 1e-15 * scale && scale - gamma_l > 1e-9 * scale {
        return Err(Error::validation(
            "chiral mapping: right channel amplitude vanishes but the self rate requires it (degenerate phase)",
        ));
    }
    if gamma_l < 1e-15 * scale && scale - gamma_r > 1e-9 * scale {
        return Err(Error::validation(
            "chiral mapping: left channel amplitude vanishes but the self rate requires it (degenerate phase)",
        ));
    }
    let tau = 2.0 * std::f64::consts::PI;
    let k_r = if gamma_r < 1e-15 * scale { 0.0 } else { v_r.arg().rem_euclid(tau) / dx };
    let k_l = if gamma_l < 1e-15 * scale { 0.0 } else { (-v_l.arg()).rem_euclid(tau) / dx };
    Ok(ChiralParams { gamma_r, gamma_l, k_r, k_l, x1, x2 })
}

/// Rotating-wave validity: all self rates must sit far below the transition
/// frequency.
pub fn rwa_check(rates: &CouplingRates, omega0: f64) -> RwaReport {
    let mut max_ratio = f64::NEG_INFINITY;
    for i in 0..rates.n() {
        max_ratio = max_ratio.max(rates.gamma[[i, i]] / omega0);
    }
    RwaReport {
        ok: omega0 > 0.0 && max_ratio < RWA_THRESHOLD,
        max_ratio,
        threshold: RWA_THRESHOLD,
    }
}

// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Master-equation dynamics for qubits with direction-dependent couplings.
//!
//! Two-qubit basis: `|1> = g1 g2`, `|2> = e1 e2`, `|3> = g1 e2`,
//! `|4> = e1 g2` (indices 0..3). The generator is the sum of a dissipative
//! part built from the rate matrices and an optional coherent drive in the
//! frame rotating at the laser frequency.
//!
//! Two dissipator forms are kept side by side: the general rate-matrix form
//! ([`lindblad_general`]) and the waveguide form with explicit propagation
//! phases ([`lindblad_chiral`]). They describe the same channel through the
//! parameter mapping in [`crate::coupling`]; the second is written out
//! directly rather than routed through the first so the equivalence stays a
//! testable statement instead of a tautology.

use std::cell::Cell;

use ndarray::linalg::kron;
use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64;

use crate::coupling::{ChiralParams, CouplingRates};
use crate::error::{Error, Result};
use crate::linalg::{self, adjoint, max_abs};

/// Re-hermitization plus trace renormalization larger than this aborts the
/// integration: the recorded samples would no longer represent the solution.
const MAX_SAMPLE_CORRECTION: f64 = 1e-6;
/// Eigenvalues below this are treated as a positivity violation rather than
/// round-off.
const MIN_EIGENVALUE: f64 = -1e-6;
/// Step-size guard for the fixed-step integrator: `dt * max_rate` must stay
/// below this for the local truncation error to be far under the sample
/// correction budget.
const MAX_RATE_PER_STEP: f64 = 0.1;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn trace(a: &ArrayView2<Complex64>) -> Complex64 {
    a.diag().sum()
}

// ---------------------------------------------------------------------------
// States

/// Validated density matrix (Hermitian, unit trace, positive semidefinite).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: Array2<Complex64>,
}

impl DensityMatrix {
    /// Validates and wraps a matrix. Hermiticity and trace are checked to
    /// 1e-10; eigenvalues may undershoot zero by at most 1e-9.
    pub fn new(rho: Array2<Complex64>) -> Result<Self> {
        let (r, cdim) = rho.dim();
        if r != cdim || r == 0 {
            return Err(Error::validation("density matrix: must be square"));
        }
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("density matrix: entries must be finite"));
        }
        let adj = adjoint(&rho.view());
        if max_abs(&(&rho - &adj).view()) > 1e-10 {
            return Err(Error::validation("density matrix: not Hermitian"));
        }
        let tr = trace(&rho.view());
        if (tr - c(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::validation(format!(
                "density matrix: trace {} is not one",
                tr.re
            )));
        }
        let eigs = linalg::eigvalsh(&rho.view())?;
        if eigs[0] < -1e-9 {
            return Err(Error::validation(format!(
                "density matrix: negative eigenvalue {:.3e}",
                eigs[0]
            )));
        }
        Ok(DensityMatrix { rho })
    }

    /// The pure state `|k><k|`.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if dim == 0 || k >= dim {
            return Err(Error::validation(format!(
                "density matrix: basis index {} out of range for dimension {}",
                k, dim
            )));
        }
        let mut rho = Array2::zeros((dim, dim));
        rho[[k, k]] = c(1.0, 0.0);
        Ok(DensityMatrix { rho })
    }

    /// Projector onto a normalized state vector.
    pub fn from_pure(amps: &[Complex64]) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::validation("density matrix: empty state vector"));
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::validation(format!(
                "density matrix: state vector norm squared {} is not one",
                norm2
            )));
        }
        let d = amps.len();
        let rho = Array2::from_shape_fn((d, d), |(i, j)| amps[i] * amps[j].conj());
        Ok(DensityMatrix { rho })
    }

    /// The maximally entangled state `(|g1 g2> + |e1 e2>) / sqrt(2)`.
    pub fn bell_gg_ee() -> Self {
        let a = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::from_pure(&[a, a, c(0.0, 0.0), c(0.0, 0.0)]).expect("normalized by construction")
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> ArrayView2<'_, Complex64> {
        self.rho.view()
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.rho
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.rho[[i, j]]
    }

    /// Diagonal populations (real parts).
    pub fn populations(&self) -> Vec<f64> {
        self.rho.diag().iter().map(|z| z.re).collect()
    }
}

// ---------------------------------------------------------------------------
// Generator pieces

/// Classical drive in the rotating frame: Rabi amplitudes for each qubit and
/// the common laser detuning (all rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DriveParams {
    pub omega1: Complex64,
    pub omega2: Complex64,
    /// Detuning `omega0 - omega_laser` of the qubits from the drive.
    pub delta_l: f64,
}

impl DriveParams {
    pub fn validate(&self) -> Result<()> {
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        if !finite(self.omega1) || !finite(self.omega2) || !self.delta_l.is_finite() {
            return Err(Error::validation("drive: parameters must be finite"));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.omega1 == c(0.0, 0.0) && self.omega2 == c(0.0, 0.0) && self.delta_l == 0.0
    }

    fn max_rate(&self) -> f64 {
        self.omega1.norm().max(self.omega2.norm()).max(self.delta_l.abs())
    }
}

/// Which dissipator drives the evolution.
#[derive(Debug, Clone, Copy)]
pub enum Generator<'a> {
    /// General rate matrices, any qubit count.
    Rates(&'a CouplingRates),
    /// Two qubits over a waveguide-style channel, written with explicit
    /// propagation phases.
    Chiral(&'a ChiralParams),
}

impl Generator<'_> {
    pub fn validate(&self) -> Result<()> {
        match self {
            Generator::Rates(r) => r.validate(),
            Generator::Chiral(p) => p.validate(),
        }
    }

    /// Hilbert-space dimension the generator acts on.
    pub fn dim(&self) -> usize {
        match self {
            Generator::Rates(r) => 1usize << r.n(),
            Generator::Chiral(_) => 4,
        }
    }

    fn max_rate(&self) -> f64 {
        match self {
            Generator::Rates(r) => r
                .gamma
                .iter()
                .chain(r.g.iter())
                .fold(0.0f64, |m, v| m.max(v.abs())),
            Generator::Chiral(p) => p.gamma_r + p.gamma_l,
        }
    }

    fn unequal_diagonals(&self) -> bool {
        match self {
            Generator::Rates(r) => {
                let diag = r.gamma.diag();
                let hi = diag.iter().fold(f64::MIN, |m, v| m.max(*v));
                let lo = diag.iter().fold(f64::MAX, |m, v| m.min(*v));
                hi - lo > 1e-12 * hi.abs()
            }
            // Both qubits share the same two channels.
            Generator::Chiral(_) => false,
        }
    }

    fn ops(&self) -> Result<MultiOps> {
        match self {
            Generator::Rates(r) => MultiOps::for_qubits(r.n()),
            Generator::Chiral(_) => MultiOps::for_qubits(2),
        }
    }
}

// ---------------------------------------------------------------------------
// Operators

/// Lowering operators for the two-qubit basis `gg, ee, g1 e2, e1 g2`.
pub fn two_qubit_lowering() -> [Array2<Complex64>; 2] {
    let one = c(1.0, 0.0);
    // sigma_1 |e1 e2> = |g1 e2>, sigma_1 |e1 g2> = |g1 g2>
    let mut s1 = Array2::zeros((4, 4));
    s1[[2, 1]] = one;
    s1[[0, 3]] = one;
    // sigma_2 |e1 e2> = |e1 g2>, sigma_2 |g1 e2> = |g1 g2>
    let mut s2 = Array2::zeros((4, 4));
    s2[[3, 1]] = one;
    s2[[0, 2]] = one;
    [s1, s2]
}

/// Lowering operators for `n` qubits in the Kronecker-product basis with
/// qubit 0 as the most significant bit. For two qubits this basis ordering
/// differs from the permuted basis used by the rest of the pipeline; the
/// dispatch in [`lindblad_general`] picks [`two_qubit_lowering`] there.
pub fn lowering_ops(n: usize) -> Result<Vec<Array2<Complex64>>> {
    if n == 0 || n > 8 {
        return Err(Error::validation(
            "lowering ops: qubit count must be between 1 and 8 (dense matrices)",
        ));
    }
    let id: Array2<Complex64> = Array2::eye(2);
    let mut low = Array2::zeros((2, 2));
    low[[0, 1]] = c(1.0, 0.0);
    let mut out = Vec::with_capacity(n);
    for q in 0..n {
        let mut acc = Array2::from_elem((1, 1), c(1.0, 0.0));
        for k in 0..n {
            acc = kron(&acc, if k == q { &low } else { &id });
        }
        out.push(acc);
    }
    Ok(out)
}

/// Lowering operators with their adjoints and number operators precomputed.
struct MultiOps {
    ops: Vec<Array2<Complex64>>,
    adjs: Vec<Array2<Complex64>>,
    nums: Vec<Array2<Complex64>>,
}

impl MultiOps {
    fn new(ops: Vec<Array2<Complex64>>) -> Self {
        let adjs: Vec<_> = ops.iter().map(|s| adjoint(&s.view())).collect();
        let nums: Vec<_> = ops
            .iter()
            .zip(&adjs)
            .map(|(s, sd)| sd.dot(s))
            .collect();
        MultiOps { ops, adjs, nums }
    }

    fn for_qubits(n: usize) -> Result<Self> {
        let ops = if n == 2 {
            two_qubit_lowering().to_vec()
        } else {
            lowering_ops(n)?
        };
        Ok(Self::new(ops))
    }
}

// ---------------------------------------------------------------------------
// Right-hand sides

/// Dissipator in the general rate-matrix form:
///
/// ```text
/// sum_i Gamma_ii/2 (2 s_i rho s_i+ - s_i+ s_i rho - rho s_i+ s_i)
/// + sum_{i != j} Gamma_ij/2 ([s_j rho, s_i+] + [s_i, rho s_j+])
/// + sum_{i != j} g_ij ([s_j rho, -i s_i+] + [i s_i, rho s_j+])
/// ```
fn multi_rhs(
    rho: &ArrayView2<Complex64>,
    ops: &MultiOps,
    gamma: &Array2<f64>,
    g: &Array2<f64>,
) -> Array2<Complex64> {
    let n = ops.ops.len();
    let dim = rho.nrows();
    let mut out = Array2::zeros((dim, dim));
    for i in 0..n {
        let gii = gamma[[i, i]];
        let jump = ops.ops[i].dot(rho).dot(&ops.adjs[i]);
        out.scaled_add(c(gii, 0.0), &jump);
        let relax = ops.nums[i].dot(rho) + rho.dot(&ops.nums[i]);
        out.scaled_add(c(-0.5 * gii, 0.0), &relax);
        for j in 0..n {
            if j == i {
                continue;
            }
            // c1 = [s_j rho, s_i+], c2 = [s_i, rho s_j+]
            let sj_rho = ops.ops[j].dot(rho);
            let c1 = sj_rho.dot(&ops.adjs[i]) - ops.adjs[i].dot(&sj_rho);
            let rho_sjd = rho.dot(&ops.adjs[j]);
            let c2 = ops.ops[i].dot(&rho_sjd) - rho_sjd.dot(&ops.ops[i]);
            out.scaled_add(c(0.5 * gamma[[i, j]], 0.0), &(&c1 + &c2));
            out.scaled_add(c(0.0, g[[i, j]]), &(&c2 - &c1));
        }
    }
    out
}

/// Dissipator in the waveguide form, with one term per propagation
/// direction and the phases written explicitly:
///
/// ```text
/// sum_j gamma_j (2 s_j rho s_j+ - rho s_j+ s_j - s_j+ s_j rho)
/// + gamma_R e^{+i k_R d} (s_2 rho s_1+ - rho s_1+ s_2)
/// + gamma_R e^{-i k_R d} (s_1 rho s_2+ - s_2+ s_1 rho)
/// + gamma_L e^{-i k_L d} (s_1 rho s_2+ - rho s_2+ s_1)
/// + gamma_L e^{+i k_L d} (s_2 rho s_1+ - s_1+ s_2 rho)
/// ```
///
/// with `d = x2 - x1` and `gamma_j = (gamma_R + gamma_L) / 2`.
fn chiral_rhs(rho: &ArrayView2<Complex64>, ops: &MultiOps, p: &ChiralParams) -> Array2<Complex64> {
    let d = p.x2 - p.x1;
    let gj = 0.5 * (p.gamma_r + p.gamma_l);
    let mut out = Array2::zeros((4, 4));
    for j in 0..2 {
        let jump = ops.ops[j].dot(rho).dot(&ops.adjs[j]);
        out.scaled_add(c(2.0 * gj, 0.0), &jump);
        let relax = ops.nums[j].dot(rho) + rho.dot(&ops.nums[j]);
        out.scaled_add(c(-gj, 0.0), &relax);
    }
    let e_r = Complex64::from_polar(1.0, p.k_r * d);
    let e_l = Complex64::from_polar(1.0, p.k_l * d);
    let s2_rho_s1d = ops.ops[1].dot(rho).dot(&ops.adjs[0]);
    let s1_rho_s2d = ops.ops[0].dot(rho).dot(&ops.adjs[1]);
    let s1d_s2 = ops.adjs[0].dot(&ops.ops[1]);
    let s2d_s1 = ops.adjs[1].dot(&ops.ops[0]);
    out.scaled_add(c(p.gamma_r, 0.0) * e_r, &(&s2_rho_s1d - &rho.dot(&s1d_s2)));
    out.scaled_add(
        c(p.gamma_r, 0.0) * e_r.conj(),
        &(&s1_rho_s2d - &s2d_s1.dot(rho)),
    );
    out.scaled_add(
        c(p.gamma_l, 0.0) * e_l.conj(),
        &(&s1_rho_s2d - &rho.dot(&s2d_s1)),
    );
    out.scaled_add(c(p.gamma_l, 0.0) * e_l, &(&s2_rho_s1d - &s1d_s2.dot(rho)));
    out
}

/// Coherent part `-i [H, rho]` with, in the rotating frame,
///
/// ```text
/// H / hbar = delta_l (n_1 + n_2)
///          - (Omega_1 e^{-i delta_l t} s_1+ + h.c.)
///          - (Omega_2 e^{-i delta_l t} s_2+ + h.c.)
/// ```
fn drive_rhs(
    rho: &ArrayView2<Complex64>,
    ops: &MultiOps,
    d: &DriveParams,
    t: f64,
) -> Array2<Complex64> {
    let dim = rho.nrows();
    let mut h = Array2::zeros((dim, dim));
    h.scaled_add(c(d.delta_l, 0.0), &(&ops.nums[0] + &ops.nums[1]));
    let ph = Complex64::from_polar(1.0, -d.delta_l * t);
    h.scaled_add(-(d.omega1 * ph), &ops.adjs[0]);
    h.scaled_add(-(d.omega1.conj() * ph.conj()), &ops.ops[0]);
    h.scaled_add(-(d.omega2 * ph), &ops.adjs[1]);
    h.scaled_add(-(d.omega2.conj() * ph.conj()), &ops.ops[1]);
    let comm = h.dot(rho) - rho.dot(&h);
    comm * c(0.0, -1.0)
}

/// General-form dissipator applied to `rho`. For two qubits the basis is the
/// permuted one documented at module level; for other counts it is the
/// Kronecker basis of [`lowering_ops`].
pub fn lindblad_general(
    rho: &ArrayView2<Complex64>,
    rates: &CouplingRates,
) -> Result<Array2<Complex64>> {
    rates.validate()?;
    let dim = 1usize << rates.n();
    if rho.dim() != (dim, dim) {
        return Err(Error::validation(format!(
            "lindblad: state is {}x{}, expected {}x{}",
            rho.nrows(),
            rho.ncols(),
            dim,
            dim
        )));
    }
    let ops = MultiOps::for_qubits(rates.n())?;
    Ok(multi_rhs(rho, &ops, &rates.gamma, &rates.g))
}

/// Dissipator built from caller-supplied lowering operators and rate
/// matrices. `gamma` and `g` are indexed like the operators.
pub fn lindblad_multi(
    rho: &ArrayView2<Complex64>,
    ops: &[Array2<Complex64>],
    gamma: &Array2<f64>,
    g: &Array2<f64>,
) -> Result<Array2<Complex64>> {
    let n = ops.len();
    if n == 0 {
        return Err(Error::validation("lindblad: no operators"));
    }
    let dim = rho.nrows();
    if rho.ncols() != dim || ops.iter().any(|s| s.dim() != (dim, dim)) {
        return Err(Error::validation(
            "lindblad: operators and state must be square and of equal size",
        ));
    }
    if gamma.dim() != (n, n) || g.dim() != (n, n) {
        return Err(Error::validation(
            "lindblad: rate matrices must be n x n for n operators",
        ));
    }
    let ops = MultiOps::new(ops.to_vec());
    Ok(multi_rhs(rho, &ops, gamma, g))
}

/// Waveguide-form dissipator applied to a two-qubit state.
pub fn lindblad_chiral(
    rho: &ArrayView2<Complex64>,
    params: &ChiralParams,
) -> Result<Array2<Complex64>> {
    params.validate()?;
    if rho.dim() != (4, 4) {
        return Err(Error::validation("lindblad: chiral form is two-qubit (4x4)"));
    }
    let ops = MultiOps::for_qubits(2)?;
    Ok(chiral_rhs(rho, &ops, params))
}

/// Coherent drive contribution `-i [H(t), rho]` for a two-qubit state.
pub fn hamiltonian_term(
    rho: &ArrayView2<Complex64>,
    drive: &DriveParams,
    t: f64,
) -> Result<Array2<Complex64>> {
    drive.validate()?;
    if rho.dim() != (4, 4) {
        return Err(Error::validation("drive: defined for two qubits (4x4)"));
    }
    let ops = MultiOps::for_qubits(2)?;
    Ok(drive_rhs(rho, &ops, drive, t))
}

// ---------------------------------------------------------------------------
// Time evolution

/// Integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Classical fourth-order Runge-Kutta at the configured step.
    FixedRk4,
    /// Dormand-Prince 5(4) with adaptive substeps between recorded samples.
    AdaptiveRk45,
}

/// Integration window, step and sampling cadence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    /// Total integration time (s).
    pub t_end: f64,
    /// Base step (s). For the adaptive method this sets the sample grid and
    /// the initial substep.
    pub dt: f64,
    pub method: Method,
    /// A sample is recorded every this many base steps.
    pub record_stride: usize,
}

impl EvolutionConfig {
    pub fn new(t_end: f64, dt: f64, method: Method, record_stride: usize) -> Result<Self> {
        let cfg = EvolutionConfig {
            t_end,
            dt,
            method,
            record_stride,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::validation("evolution config: t_end must be positive"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::validation("evolution config: dt must be positive"));
        }
        if self.record_stride == 0 {
            return Err(Error::validation(
                "evolution config: record_stride must be at least 1",
            ));
        }
        Ok(())
    }

    /// Fixed-step configuration with `dt = 1e-3 / max_rate` and a stride
    /// that keeps roughly two thousand recorded samples.
    pub fn fixed(t_end: f64, max_rate: f64) -> Result<Self> {
        if !(max_rate > 0.0) || !max_rate.is_finite() {
            return Err(Error::validation(
                "evolution config: max_rate must be positive",
            ));
        }
        let dt = 1e-3 / max_rate;
        let steps = (t_end / dt).ceil().max(1.0) as usize;
        Self::new(t_end, dt, Method::FixedRk4, (steps / 2000).max(1))
    }
}

/// Integration diagnostics, accumulated over the recorded samples.
#[derive(Debug, Clone, Copy)]
pub struct EvolutionStats {
    /// Accepted integrator steps.
    pub steps: u64,
    pub rhs_evaluations: u64,
    /// Largest `|tr rho - 1|` seen before renormalization.
    pub max_trace_drift: f64,
    /// Largest entry of `|rho - rho+|` seen before re-hermitization.
    pub max_herm_drift: f64,
    /// Largest entrywise change applied when snapping a sample back onto
    /// the physical manifold.
    pub max_renorm_correction: f64,
    /// Smallest eigenvalue over all recorded samples.
    pub min_eigenvalue: f64,
    /// Set when the diagonal decay rates differ; closed-form cross-checks
    /// assume they are equal.
    pub unequal_diagonal_rates: bool,
}

impl Default for EvolutionStats {
    fn default() -> Self {
        EvolutionStats {
            steps: 0,
            rhs_evaluations: 0,
            max_trace_drift: 0.0,
            max_herm_drift: 0.0,
            max_renorm_correction: 0.0,
            min_eigenvalue: f64::INFINITY,
            unequal_diagonal_rates: false,
        }
    }
}

/// Recorded evolution: sample times, validated states and diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub stats: EvolutionStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory always has samples")
    }
}

/// Re-hermitize and renormalize a raw integrator state, fold the drifts into
/// the statistics and reject samples that moved too far or lost positivity.
fn record_sample(
    t: f64,
    rho: &mut Array2<Complex64>,
    stats: &mut EvolutionStats,
    times: &mut Vec<f64>,
    states: &mut Vec<DensityMatrix>,
) -> Result<()> {
    let tr = trace(&rho.view());
    let trace_drift = (tr - c(1.0, 0.0)).norm();
    let adj = adjoint(&rho.view());
    let herm_drift = max_abs(&(&*rho - &adj).view());
    let mut fixed = (&*rho + &adj).mapv(|z| 0.5 * z);
    // Trace of the hermitized matrix is real by construction.
    let tr_fixed = trace(&fixed.view()).re;
    fixed.mapv_inplace(|z| z / tr_fixed);
    let correction = max_abs(&(&fixed - &*rho).view());
    stats.max_trace_drift = stats.max_trace_drift.max(trace_drift);
    stats.max_herm_drift = stats.max_herm_drift.max(herm_drift);
    stats.max_renorm_correction = stats.max_renorm_correction.max(correction);
    if !correction.is_finite() || correction > MAX_SAMPLE_CORRECTION {
        return Err(Error::numerical(format!(
            "evolve: sample correction {:.3e} at t = {:.6e} exceeds {:.0e}; \
             the integration is inaccurate",
            correction, t, MAX_SAMPLE_CORRECTION
        )));
    }
    let eigs = linalg::eigvalsh(&fixed.view())?;
    stats.min_eigenvalue = stats.min_eigenvalue.min(eigs[0]);
    if eigs[0] < MIN_EIGENVALUE {
        return Err(Error::numerical(format!(
            "evolve: positivity violated at t = {:.6e} (eigenvalue {:.3e}); \
             the rates do not define a completely positive map or the step \
             size is too large",
            t, eigs[0]
        )));
    }
    *rho = fixed.clone();
    times.push(t);
    states.push(DensityMatrix { rho: fixed });
    Ok(())
}

fn rk4_step<F>(f: &F, t: f64, y: &mut Array2<Complex64>, h: f64)
where
    F: Fn(f64, &Array2<Complex64>) -> Array2<Complex64>,
{
    let k1 = f(t, y);
    let mut y2 = y.clone();
    y2.scaled_add(c(0.5 * h, 0.0), &k1);
    let k2 = f(t + 0.5 * h, &y2);
    let mut y3 = y.clone();
    y3.scaled_add(c(0.5 * h, 0.0), &k2);
    let k3 = f(t + 0.5 * h, &y3);
    let mut y4 = y.clone();
    y4.scaled_add(c(h, 0.0), &k3);
    let k4 = f(t + h, &y4);
    y.scaled_add(c(h / 6.0, 0.0), &k1);
    y.scaled_add(c(h / 3.0, 0.0), &k2);
    y.scaled_add(c(h / 3.0, 0.0), &k3);
    y.scaled_add(c(h / 6.0, 0.0), &k4);
}

/// `y + h * sum(coef_i * k_i)`.
fn rk_combine(
    y: &Array2<Complex64>,
    h: f64,
    terms: &[(f64, &Array2<Complex64>)],
) -> Array2<Complex64> {
    let mut out = y.clone();
    for (coef, k) in terms {
        out.scaled_add(c(h * coef, 0.0), k);
    }
    out
}

const RK45_RTOL: f64 = 1e-9;
const RK45_ATOL: f64 = 1e-12;

/// Advance `y` from `t0` to `t1` with Dormand-Prince 5(4) steps, adapting
/// the persistent step `h`.
fn rk45_advance<F>(
    f: &F,
    y: &mut Array2<Complex64>,
    t0: f64,
    t1: f64,
    h: &mut f64,
    stats: &mut EvolutionStats,
) -> Result<()>
where
    F: Fn(f64, &Array2<Complex64>) -> Array2<Complex64>,
{
    let span = t1 - t0;
    let mut t = t0;
    loop {
        let remaining = t1 - t;
        if remaining <= 0.0 {
            return Ok(());
        }
        let clipped = *h >= remaining;
        let hs = if clipped { remaining } else { *h };
        let k1 = f(t, y);
        let k2 = f(t + 0.2 * hs, &rk_combine(y, hs, &[(0.2, &k1)]));
        let k3 = f(
            t + 0.3 * hs,
            &rk_combine(y, hs, &[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)]),
        );
        let k4 = f(
            t + 0.8 * hs,
            &rk_combine(
                y,
                hs,
                &[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)],
            ),
        );
        let k5 = f(
            t + 8.0 / 9.0 * hs,
            &rk_combine(
                y,
                hs,
                &[
                    (19372.0 / 6561.0, &k1),
                    (-25360.0 / 2187.0, &k2),
                    (64448.0 / 6561.0, &k3),
                    (-212.0 / 729.0, &k4),
                ],
            ),
        );
        let k6 = f(
            t + hs,
            &rk_combine(
                y,
                hs,
                &[
                    (9017.0 / 3168.0, &k1),
                    (-355.0 / 33.0, &k2),
                    (46732.0 / 5247.0, &k3),
                    (49.0 / 176.0, &k4),
                    (-5103.0 / 18656.0, &k5),
                ],
            ),
        );
        // Fifth-order solution; its stage row equals the b row.
        let y5 = rk_combine(
            y,
            hs,
            &[
                (35.0 / 384.0, &k1),
                (500.0 / 1113.0, &k3),
                (125.0 / 192.0, &k4),
                (-2187.0 / 6784.0, &k5),
                (11.0 / 84.0, &k6),
            ],
        );
        let k7 = f(t + hs, &y5);
        let zero = Array2::zeros(y.raw_dim());
        let err_mat = rk_combine(
            &zero,
            hs,
            &[
                (71.0 / 57600.0, &k1),
                (-71.0 / 16695.0, &k3),
                (71.0 / 1920.0, &k4),
                (-17253.0 / 339200.0, &k5),
                (22.0 / 525.0, &k6),
                (-1.0 / 40.0, &k7),
            ],
        );
        let mut err = 0.0f64;
        for ((e, a), b) in err_mat.iter().zip(y.iter()).zip(y5.iter()) {
            let scale = RK45_ATOL + RK45_RTOL * a.norm().max(b.norm());
            err = err.max(e.norm() / scale);
        }
        let accept = err.is_finite() && err <= 1.0;
        if accept {
            *y = y5;
            t += hs;
            stats.steps += 1;
        }
        let factor = if err.is_finite() {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            0.2
        };
        // A step clipped to the node end says nothing about accuracy; keep
        // the persistent step unless the error estimate wants it smaller.
        if !(clipped && factor >= 1.0) {
            *h = hs * factor;
        }
        if accept && clipped {
            return Ok(());
        }
        if *h < 1e-15 * span {
            return Err(Error::numerical(format!(
                "evolve: adaptive step underflow at t = {:.6e}",
                t
            )));
        }
    }
}

/// Integrate the master equation from `rho0` over `cfg.t_end`.
///
/// Each recorded sample is re-hermitized and trace-renormalized, with the
/// applied correction tracked in the statistics; a correction beyond 1e-6 or
/// an eigenvalue below -1e-6 aborts the run. The fixed-step method requires
/// `dt * max_rate < 0.1` where `max_rate` is the largest rate in the
/// generator and the drive.
pub fn evolve(
    rho0: &DensityMatrix,
    gen: Generator<'_>,
    drive: &DriveParams,
    cfg: &EvolutionConfig,
) -> Result<Trajectory> {
    gen.validate()?;
    drive.validate()?;
    cfg.validate()?;
    let dim = gen.dim();
    if rho0.dim() != dim {
        return Err(Error::validation(format!(
            "evolve: state dimension {} does not match generator dimension {}",
            rho0.dim(),
            dim
        )));
    }
    let driving = !drive.is_zero();
    if driving && dim != 4 {
        return Err(Error::validation("evolve: the drive is defined for two qubits"));
    }
    let max_rate = gen.max_rate().max(drive.max_rate());
    if cfg.dt * max_rate >= MAX_RATE_PER_STEP {
        return Err(Error::validation(format!(
            "evolve: dt = {:.3e} is too coarse for the fastest rate {:.3e}; \
             dt * rate must stay below {}",
            cfg.dt, max_rate, MAX_RATE_PER_STEP
        )));
    }
    let n_steps = (cfg.t_end / cfg.dt).ceil().max(1.0) as usize;
    let dt = cfg.t_end / n_steps as f64;
    let ops = gen.ops()?;
    let evals = Cell::new(0u64);
    let rhs = |t: f64, y: &Array2<Complex64>| -> Array2<Complex64> {
        evals.set(evals.get() + 1);
        let mut out = match gen {
            Generator::Rates(r) => multi_rhs(&y.view(), &ops, &r.gamma, &r.g),
            Generator::Chiral(p) => chiral_rhs(&y.view(), &ops, p),
        };
        if driving {
            out += &drive_rhs(&y.view(), &ops, drive, t);
        }
        out
    };
    let mut stats = EvolutionStats {
        unequal_diagonal_rates: gen.unequal_diagonals(),
        ..EvolutionStats::default()
    };
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut rho = rho0.matrix().to_owned();
    record_sample(0.0, &mut rho, &mut stats, &mut times, &mut states)?;
    match cfg.method {
        Method::FixedRk4 => {
            for step in 1..=n_steps {
                let t = (step - 1) as f64 * dt;
                rk4_step(&rhs, t, &mut rho, dt);
                stats.steps += 1;
                if step % cfg.record_stride == 0 || step == n_steps {
                    record_sample(
                        step as f64 * dt,
                        &mut rho,
                        &mut stats,
                        &mut times,
                        &mut states,
                    )?;
                }
            }
        }
        Method::AdaptiveRk45 => {
            let mut h = dt;
            let mut t_node = 0.0;
            for step in (1..=n_steps).filter(|s| s % cfg.record_stride == 0 || *s == n_steps) {
                let t_next = if step == n_steps {
                    cfg.t_end
                } else {
                    step as f64 * dt
                };
                rk45_advance(&rhs, &mut rho, t_node, t_next, &mut h, &mut stats)?;
                t_node = t_next;
                record_sample(t_next, &mut rho, &mut stats, &mut times, &mut states)?;
            }
        }
    }
    stats.rhs_evaluations = evals.get();
    Ok(Trajectory {
        times,
        states,
        stats,
    })
}

// ---------------------------------------------------------------------------
// Steady state

/// Steady state of the time-independent generator (zero detuning only).
///
/// The generator is assembled column by column into a `d^2 x d^2` matrix;
/// a one-dimensional kernel is required and confirmed through the spectrum,
/// then the linear system is closed with the unit-trace row.
pub fn steady_state(gen: Generator<'_>, drive: &DriveParams) -> Result<DensityMatrix> {
    gen.validate()?;
    drive.validate()?;
    if drive.delta_l != 0.0 {
        return Err(Error::validation(
            "steady state: requires zero detuning (time-independent generator)",
        ));
    }
    let dim = gen.dim();
    let driving = !drive.is_zero();
    if driving && dim != 4 {
        return Err(Error::validation(
            "steady state: the drive is defined for two qubits",
        ));
    }
    let ops = gen.ops()?;
    let d2 = dim * dim;
    let mut lmat = Array2::zeros((d2, d2));
    for a in 0..dim {
        for b in 0..dim {
            let mut basis = Array2::zeros((dim, dim));
            basis[[a, b]] = c(1.0, 0.0);
            let mut col = match gen {
                Generator::Rates(r) => multi_rhs(&basis.view(), &ops, &r.gamma, &r.g),
                Generator::Chiral(p) => chiral_rhs(&basis.view(), &ops, p),
            };
            if driving {
                col += &drive_rhs(&basis.view(), &ops, drive, 0.0);
            }
            for i in 0..dim {
                for j in 0..dim {
                    lmat[[dim * i + j, dim * a + b]] = col[[i, j]];
                }
            }
        }
    }
    let eigs = linalg::eigvals(&lmat.view())?;
    let scale = eigs.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let kernel = eigs.iter().filter(|z| z.norm() <= 1e-10 * scale).count();
    if kernel != 1 {
        return Err(Error::numerical(format!(
            "steady state: generator kernel has dimension {}; no unique steady state",
            kernel
        )));
    }
    // The dim diagonal rows sum to zero (trace conservation), so one of them
    // is redundant; replace the first with the normalization row.
    let mut closed = lmat.clone();
    for col in 0..d2 {
        closed[[0, col]] = c(0.0, 0.0);
    }
    for k in 0..dim {
        closed[[0, (dim + 1) * k]] = c(1.0, 0.0);
    }
    let mut b: Array1<Complex64> = Array1::zeros(d2);
    b[0] = c(1.0, 0.0);
    let v = linalg::solve(&closed.view(), &b)?;
    let resid = lmat
        .dot(&v)
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let lnorm = linalg::fro_norm(&lmat.view());
    if resid > 1e-10 * lnorm {
        return Err(Error::numerical(format!(
            "steady state: residual {:.3e} exceeds 1e-10 of the generator norm {:.3e}",
            resid, lnorm
        )));
    }
    let raw = Array2::from_shape_fn((dim, dim), |(i, j)| v[dim * i + j]);
    let adj = adjoint(&raw.view());
    let mut rho = (&raw + &adj).mapv(|z| 0.5 * z);
    let tr = trace(&rho.view()).re;
    rho.mapv_inplace(|z| z / tr);
    DensityMatrix::new(rho)
}

// ---------------------------------------------------------------------------
// Closed-form reference

/// One-excitation decay with purely forward coupling (`Gamma_12 = g_12 = 0`,
/// equal diagonal rates), starting from `|e1 g2>`:
///
/// ```text
/// rho_44 = e^{-G t},     rho_43 = -q t e^{-G t},  q = Gamma_21/2 + i g_21
/// rho_33 = |q|^2 t^2 e^{-G t},   rho_11 = 1 - rho_44 - rho_33
/// ```
///
/// with `G = Gamma_11`.
pub fn analytic_unidirectional(
    t: f64,
    gamma11: f64,
    gamma21: f64,
    g21: f64,
) -> Result<DensityMatrix> {
    if !(gamma11 > 0.0) || !gamma11.is_finite() || !gamma21.is_finite() || !g21.is_finite() {
        return Err(Error::validation(
            "analytic solution: gamma11 must be positive and rates finite",
        ));
    }
    if !(t >= 0.0) {
        return Err(Error::validation("analytic solution: t must be >= 0"));
    }
    let q = c(0.5 * gamma21, g21);
    let decay = (-gamma11 * t).exp();
    let mut rho = Array2::zeros((4, 4));
    rho[[3, 3]] = c(decay, 0.0);
    rho[[3, 2]] = -q * t * decay;
    rho[[2, 3]] = -q.conj() * t * decay;
    rho[[2, 2]] = c(q.norm_sqr() * t * t * decay, 0.0);
    rho[[0, 0]] = c(1.0 - decay - q.norm_sqr() * t * t * decay, 0.0);
    DensityMatrix::new(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
        max_abs(&(a - b).view())
    }

    fn random_density(seed: u64, dim: usize) -> Array2<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Array2::from_shape_fn((dim, dim), |_| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let m = a.dot(&adjoint(&a.view()));
        let tr = trace(&m.view()).re;
        m.mapv(|z| z / tr)
    }

    fn sample_rates() -> CouplingRates {
        CouplingRates::two_qubit([[1.0, 0.5], [0.8, 1.3]], [[0.0, -0.3], [0.4, 0.0]]).unwrap()
    }

    // Two-qubit expansion with one line per direction, coefficients
    // Gamma/2 +- i g. Written independently of the production sum as a
    // cross-check oracle.
    fn two_qubit_expansion_rhs(
        rho: &Array2<Complex64>,
        gamma: [[f64; 2]; 2],
        g21: f64,
        g12: f64,
    ) -> Array2<Complex64> {
        let [s1, s2] = two_qubit_lowering();
        let s1d = adjoint(&s1.view());
        let s2d = adjoint(&s2.view());
        let mut out = Array2::zeros((4, 4));
        for (s, sd, gjj) in [(&s1, &s1d, gamma[0][0]), (&s2, &s2d, gamma[1][1])] {
            let jump = s.dot(rho).dot(sd);
            let num = sd.dot(s);
            out.scaled_add(c(gjj, 0.0), &jump);
            out.scaled_add(c(-0.5 * gjj, 0.0), &(rho.dot(&num) + num.dot(rho)));
        }
        let s1d_s2 = s1d.dot(&s2);
        let s2d_s1 = s2d.dot(&s1);
        out.scaled_add(
            c(0.5 * gamma[1][0], g21),
            &(s2.dot(rho).dot(&s1d) - rho.dot(&s1d_s2)),
        );
        out.scaled_add(
            c(0.5 * gamma[1][0], -g21),
            &(s1.dot(rho).dot(&s2d) - s2d_s1.dot(rho)),
        );
        out.scaled_add(
            c(0.5 * gamma[0][1], g12),
            &(s1.dot(rho).dot(&s2d) - rho.dot(&s2d_s1)),
        );
        out.scaled_add(
            c(0.5 * gamma[0][1], -g12),
            &(s2.dot(rho).dot(&s1d) - s1d_s2.dot(rho)),
        );
        out
    }

    // Symmetric-rate form: dipole-dipole Hamiltonian plus a symmetric
    // dissipator double sum. Valid only for Gamma_12 = Gamma_21 and
    // g_12 = g_21.
    fn reciprocal_rhs(rho: &Array2<Complex64>, gamma: [[f64; 2]; 2], gs: f64) -> Array2<Complex64> {
        let [s1, s2] = two_qubit_lowering();
        let s1d = adjoint(&s1.view());
        let s2d = adjoint(&s2.view());
        let ops = [&s1, &s2];
        let adjs = [&s1d, &s2d];
        // H/hbar = -g (s1+ s2 + s2+ s1)
        let h = (s1d.dot(&s2) + s2d.dot(&s1)).mapv(|z| c(-gs, 0.0) * z);
        let comm = h.dot(rho) - rho.dot(&h);
        let mut out = comm * c(0.0, -1.0);
        for i in 0..2 {
            for j in 0..2 {
                let jump = ops[j].dot(rho).dot(adjs[i]);
                let cross = adjs[i].dot(ops[j]);
                out.scaled_add(c(gamma[i][j], 0.0), &jump);
                out.scaled_add(
                    c(-0.5 * gamma[i][j], 0.0),
                    &(cross.dot(rho) + rho.dot(&cross)),
                );
            }
        }
        out
    }

    #[test]
    fn ground_state_is_stationary() {
        let rho = DensityMatrix::basis_state(4, 0).unwrap();
        let rates = sample_rates();
        let out = lindblad_general(&rho.matrix(), &rates).unwrap();
        assert!(max_abs(&out.view()) < 1e-15);
        let chir = ChiralParams {
            gamma_r: 0.8,
            gamma_l: 0.3,
            k_r: 2.0,
            k_l: 2.4,
            x1: 0.0,
            x2: 1.1,
        };
        let out = lindblad_chiral(&rho.matrix(), &chir).unwrap();
        assert!(max_abs(&out.view()) < 1e-15);
    }

    #[test]
    fn general_form_matches_two_qubit_expansion() {
        let gamma = [[1.0, 0.5], [0.8, 1.3]];
        let (g21, g12) = (0.4, -0.3);
        let rates = CouplingRates::two_qubit(gamma, [[0.0, g12], [g21, 0.0]]).unwrap();
        for seed in 0..20 {
            let rho = random_density(seed, 4);
            let a = lindblad_general(&rho.view(), &rates).unwrap();
            let b = two_qubit_expansion_rhs(&rho, gamma, g21, g12);
            assert!(max_diff(&a, &b) < 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn general_form_matches_reciprocal_form_for_symmetric_rates() {
        let gamma = [[1.0, 0.6], [0.6, 1.0]];
        let gs = 0.35;
        let rates = CouplingRates::two_qubit(gamma, [[0.0, gs], [gs, 0.0]]).unwrap();
        for seed in 0..20 {
            let rho = random_density(100 + seed, 4);
            let a = lindblad_general(&rho.view(), &rates).unwrap();
            let b = reciprocal_rhs(&rho, gamma, gs);
            assert!(max_diff(&a, &b) < 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn chiral_form_matches_general_form_through_the_mapping() {
        let cases = [
            (0.8, 0.3, 2.0, 2.4, 0.0, 1.1),
            (0.5, 0.5, 0.0, 0.0, -0.3, 0.9),
            (1.2, 0.0, 3.1, 1.0, 0.0, 0.47),
            (0.05, 0.9, -1.3, 2.2, 1.0, 3.5),
        ];
        for (gr, gl, kr, kl, x1, x2) in cases {
            let chir = ChiralParams {
                gamma_r: gr,
                gamma_l: gl,
                k_r: kr,
                k_l: kl,
                x1,
                x2,
            };
            let rates = crate::coupling::chiral_to_rates(&chir).unwrap();
            for seed in 0..5 {
                let rho = random_density(7000 + seed, 4);
                let a = lindblad_chiral(&rho.view(), &chir).unwrap();
                let b = lindblad_general(&rho.view(), &rates).unwrap();
                assert!(max_diff(&a, &b) < 1e-12, "case {gr} {gl} {kr} {kl}");
            }
        }
    }

    #[test]
    fn zero_rates_give_zero_rhs() {
        let chir = ChiralParams {
            gamma_r: 0.0,
            gamma_l: 0.0,
            k_r: 1.0,
            k_l: 1.0,
            x1: 0.0,
            x2: 1.0,
        };
        let rho = random_density(3, 4);
        let out = lindblad_chiral(&rho.view(), &chir).unwrap();
        assert!(max_abs(&out.view()) == 0.0);
    }

    #[test]
    fn drive_seeds_the_ground_to_one_excitation_coherences() {
        let rho = DensityMatrix::basis_state(4, 0).unwrap();
        let drive = DriveParams {
            omega1: c(0.37, 0.0),
            omega2: c(0.0, 0.21),
            delta_l: 0.9,
        };
        let out = hamiltonian_term(&rho.matrix(), &drive, 0.0).unwrap();
        // d rho_41 / dt = i Omega_1, d rho_31 / dt = i Omega_2 at t = 0.
        assert!((out[[3, 0]] - c(0.0, 1.0) * drive.omega1).norm() < 1e-15);
        assert!((out[[2, 0]] - c(0.0, 1.0) * drive.omega2).norm() < 1e-15);

        // Zero detuning makes the rotating-frame generator time independent.
        let drive = DriveParams {
            omega1: c(0.2, 0.1),
            omega2: c(-0.05, 0.0),
            delta_l: 0.0,
        };
        let rho = random_density(11, 4);
        let a = hamiltonian_term(&rho.view(), &drive, 0.0).unwrap();
        let b = hamiltonian_term(&rho.view(), &drive, 1.7).unwrap();
        assert!(max_diff(&a, &b) == 0.0);

        let none = DriveParams::default();
        let out = hamiltonian_term(&rho.view(), &none, 0.3).unwrap();
        assert!(max_abs(&out.view()) == 0.0);
    }

    #[test]
    fn number_operators_match_the_basis_labels() {
        let ops = MultiOps::for_qubits(2).unwrap();
        // gg, ee, g1 e2, e1 g2
        let want1 = [0.0, 1.0, 0.0, 1.0];
        let want2 = [0.0, 1.0, 1.0, 0.0];
        for k in 0..4 {
            assert_eq!(ops.nums[0][[k, k]], c(want1[k], 0.0));
            assert_eq!(ops.nums[1][[k, k]], c(want2[k], 0.0));
        }
        assert!(max_abs(&(&ops.nums[0] - &ops.nums[0].dot(&ops.nums[0])).view()) == 0.0);
    }

    #[test]
    fn kronecker_lowering_ops_carry_one_bit_each() {
        let n = 3;
        let ops = lowering_ops(n).unwrap();
        assert_eq!(ops.len(), n);
        for (q, s) in ops.iter().enumerate() {
            assert_eq!(s.dim(), (8, 8));
            // Nilpotent and number operator matching bit q (qubit 0 most
            // significant).
            assert!(max_abs(&s.dot(s).view()) == 0.0);
            let num = adjoint(&s.view()).dot(s);
            for m in 0..8usize {
                let bit = (m >> (n - 1 - q)) & 1;
                assert_eq!(num[[m, m]], c(bit as f64, 0.0));
            }
        }
        assert!(lowering_ops(0).is_err());
        assert!(lowering_ops(9).is_err());
    }

    #[test]
    fn three_qubit_ground_state_is_stationary() {
        let gamma = Array2::from_shape_fn((3, 3), |(i, j)| if i == j { 1.0 } else { 0.2 });
        let g = Array2::from_shape_fn((3, 3), |(i, j)| if i == j { 0.0 } else { 0.1 });
        let rates = CouplingRates::new(gamma, g).unwrap();
        let rho = DensityMatrix::basis_state(8, 0).unwrap();
        let out = lindblad_general(&rho.matrix(), &rates).unwrap();
        assert!(max_abs(&out.view()) < 1e-15);
    }

    #[test]
    fn analytic_solution_spot_values() {
        // Gamma_11 = 1, Gamma_21 = 0.9, g_21 = 0 at t = 1.
        let rho = analytic_unidirectional(1.0, 1.0, 0.9, 0.0).unwrap();
        assert!((rho.entry(3, 3).re - 0.3678794411714423).abs() < 1e-15);
        assert!((rho.entry(2, 2).re - 0.0744955868372171).abs() < 1e-15);
        assert!((rho.entry(3, 2).re - (-0.1655457485271491)).abs() < 1e-15);
        assert!(rho.entry(3, 2).im.abs() < 1e-15);
        assert!((rho.entry(0, 0).re - 0.5576249719913406).abs() < 1e-15);

        let tr: f64 = rho.populations().iter().sum();
        assert!((tr - 1.0).abs() < 1e-15);

        let rho0 = analytic_unidirectional(0.0, 1.0, 0.9, 0.2).unwrap();
        assert_eq!(rho0.entry(3, 3), c(1.0, 0.0));

        assert!(analytic_unidirectional(-0.1, 1.0, 0.9, 0.0).is_err());
        assert!(analytic_unidirectional(1.0, 0.0, 0.9, 0.0).is_err());
    }

    #[test]
    fn evolve_matches_the_analytic_solution() {
        let (g11, g21, gc) = (1.0, 0.9, 0.2);
        let rates = CouplingRates::two_qubit([[g11, 0.0], [g21, g11]], [[0.0, 0.0], [gc, 0.0]])
            .unwrap();
        let rho0 = DensityMatrix::basis_state(4, 3).unwrap();
        let cfg = EvolutionConfig::fixed(8.0, g11).unwrap();
        let traj = evolve(&rho0, Generator::Rates(&rates), &DriveParams::default(), &cfg).unwrap();
        let mut worst = 0.0f64;
        for (t, state) in traj.times.iter().zip(&traj.states) {
            let want = analytic_unidirectional(*t, g11, g21, gc).unwrap();
            worst = worst.max(max_diff(
                &state.matrix().to_owned(),
                &want.matrix().to_owned(),
            ));
        }
        assert!(worst < 1e-6, "worst deviation {worst:.3e}");
    }

    #[test]
    fn trace_and_hermiticity_are_preserved() {
        let rates = sample_rates();
        let chir = ChiralParams {
            gamma_r: 0.8,
            gamma_l: 0.3,
            k_r: 2.0,
            k_l: 2.4,
            x1: 0.0,
            x2: 1.1,
        };
        let drive = DriveParams {
            omega1: c(0.3, 0.1),
            omega2: c(0.0, 0.2),
            delta_l: 0.4,
        };
        let cfg = EvolutionConfig::fixed(3.0, 1.3).unwrap();
        for seed in 0..10 {
            let rho0 = DensityMatrix::new(random_density(200 + seed, 4)).unwrap();
            for gen in [Generator::Rates(&rates), Generator::Chiral(&chir)] {
                let traj = evolve(&rho0, gen, &drive, &cfg).unwrap();
                assert!(traj.stats.max_trace_drift < 1e-9, "seed {seed}");
                assert!(traj.stats.max_herm_drift < 1e-9, "seed {seed}");
                assert!(traj.stats.min_eigenvalue > -1e-9, "seed {seed}");
            }
        }
    }

    #[test]
    fn undriven_decay_stays_in_the_one_excitation_block() {
        let rates = sample_rates();
        let rho0 = DensityMatrix::basis_state(4, 3).unwrap();
        let cfg = EvolutionConfig::fixed(5.0, 1.3).unwrap();
        let traj = evolve(&rho0, Generator::Rates(&rates), &DriveParams::default(), &cfg).unwrap();
        // Allowed support: ground population and the one-excitation block.
        let allowed = [(0, 0), (2, 2), (2, 3), (3, 2), (3, 3)];
        for state in &traj.states {
            for i in 0..4 {
                for j in 0..4 {
                    if !allowed.contains(&(i, j)) {
                        assert!(state.entry(i, j).norm() < 1e-10, "entry {i}{j}");
                    }
                }
            }
        }
    }

    #[test]
    fn blocked_back_coupling_keeps_the_upstream_qubit_dark() {
        // Forward coupling only; starting from |g1 e2> nothing reaches
        // qubit 1.
        let rates =
            CouplingRates::two_qubit([[1.0, 0.0], [0.9, 1.0]], [[0.0, 0.0], [0.2, 0.0]]).unwrap();
        let rho0 = DensityMatrix::basis_state(4, 2).unwrap();
        let cfg = EvolutionConfig::fixed(6.0, 1.0).unwrap();
        let traj = evolve(&rho0, Generator::Rates(&rates), &DriveParams::default(), &cfg).unwrap();
        for state in &traj.states {
            assert!(state.entry(3, 3).norm() < 1e-10);
        }
    }

    #[test]
    fn steady_state_matches_the_driven_two_level_closed_form() {
        // Uncoupled qubits, drive on qubit 1 only: excited population
        // Omega^2 / (Gamma^2/4 + 2 Omega^2) = 9/43 for Omega = 0.3,
        // Gamma = 1.
        let rates =
            CouplingRates::two_qubit([[1.0, 0.0], [0.0, 1.0]], [[0.0, 0.0], [0.0, 0.0]]).unwrap();
        let drive = DriveParams {
            omega1: c(0.3, 0.0),
            ..DriveParams::default()
        };
        let ss = steady_state(Generator::Rates(&rates), &drive).unwrap();
        assert!((ss.entry(3, 3).re - 9.0 / 43.0).abs() < 1e-12);
        // Qubit 2 stays in the ground state.
        assert!(ss.entry(2, 2).norm() < 1e-12);
        assert!(ss.entry(1, 1).norm() < 1e-12);
    }

    #[test]
    fn steady_state_matches_long_time_integration() {
        let rates =
            CouplingRates::two_qubit([[1.0, 0.3], [0.9, 1.0]], [[0.0, -0.1], [0.2, 0.0]]).unwrap();
        let drive = DriveParams {
            omega1: c(0.25, 0.0),
            omega2: c(0.0, 0.15),
            delta_l: 0.0,
        };
        let ss = steady_state(Generator::Rates(&rates), &drive).unwrap();
        let rho0 = DensityMatrix::basis_state(4, 0).unwrap();
        let cfg = EvolutionConfig::new(60.0, 0.01, Method::FixedRk4, 100).unwrap();
        let traj = evolve(&rho0, Generator::Rates(&rates), &drive, &cfg).unwrap();
        let diff = max_diff(
            &traj.final_state().matrix().to_owned(),
            &ss.matrix().to_owned(),
        );
        assert!(diff < 1e-6, "difference {diff:.3e}");
    }

    #[test]
    fn steady_state_rejects_detuned_drives() {
        let rates = sample_rates();
        let drive = DriveParams {
            omega1: c(0.1, 0.0),
            delta_l: 0.3,
            ..DriveParams::default()
        };
        assert!(steady_state(Generator::Rates(&rates), &drive).is_err());
    }

    #[test]
    fn degenerate_kernel_is_reported() {
        // The zero generator leaves every state fixed: a full kernel.
        let chir = ChiralParams {
            gamma_r: 0.0,
            gamma_l: 0.0,
            k_r: 1.0,
            k_l: 1.0,
            x1: 0.0,
            x2: 1.0,
        };
        let err = steady_state(Generator::Chiral(&chir), &DriveParams::default()).unwrap_err();
        assert!(err.to_string().contains("kernel"));
    }

    #[test]
    fn evolve_rejects_too_coarse_steps() {
        let rates = sample_rates();
        let rho0 = DensityMatrix::basis_state(4, 0).unwrap();
        let cfg = EvolutionConfig::new(10.0, 0.2, Method::FixedRk4, 1).unwrap();
        let err = evolve(&rho0, Generator::Rates(&rates), &DriveParams::default(), &cfg)
            .unwrap_err();
        assert!(err.to_string().contains("dt"));
    }

    #[test]
    fn unphysical_rates_abort_on_positivity() {
        // Cross rate far beyond the Cauchy-Schwarz bound: the map is not
        // completely positive and an eigenvalue dives negative.
        let rates =
            CouplingRates::two_qubit([[1.0, 0.0], [3.0, 1.0]], [[0.0, 0.0], [0.0, 0.0]]).unwrap();
        let rho0 = DensityMatrix::basis_state(4, 3).unwrap();
        let cfg = EvolutionConfig::fixed(4.0, 3.0).unwrap();
        let err = evolve(&rho0, Generator::Rates(&rates), &DriveParams::default(), &cfg)
            .unwrap_err();
        assert!(err.to_string().contains("positivity"));
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        assert!(EvolutionConfig::new(0.0, 0.1, Method::FixedRk4, 1).is_err());
        assert!(EvolutionConfig::new(1.0, -0.1, Method::FixedRk4, 1).is_err());
        assert!(EvolutionConfig::new(1.0, 0.1, Method::FixedRk4, 0).is_err());
        assert!(EvolutionConfig::fixed(1.0, 0.0).is_err());
        let drive = DriveParams {
            omega1: c(f64::NAN, 0.0),
            ..DriveParams::default()
        };
        assert!(drive.validate().is_err());
    }

    #[test]
    fn adaptive_and_fixed_integrators_agree() {
        let rates =
            CouplingRates::two_qubit([[1.0, 0.3], [0.9, 1.0]], [[0.0, -0.1], [0.2, 0.0]]).unwrap();
        let drive = DriveParams {
            omega1: c(0.25, 0.0),
            omega2: c(0.0, 0.15),
            delta_l: 0.2,
        };
        let rho0 = DensityMatrix::bell_gg_ee();
        let fixed = EvolutionConfig::new(5.0, 0.004, Method::FixedRk4, 250).unwrap();
        let adaptive = EvolutionConfig::new(5.0, 0.004, Method::AdaptiveRk45, 250).unwrap();
        let a = evolve(&rho0, Generator::Rates(&rates), &drive, &fixed).unwrap();
        let b = evolve(&rho0, Generator::Rates(&rates), &drive, &adaptive).unwrap();
        assert_eq!(a.times.len(), b.times.len());
        let diff = max_diff(
            &a.final_state().matrix().to_owned(),
            &b.final_state().matrix().to_owned(),
        );
        assert!(diff < 5e-8, "difference {diff:.3e}");
        // The adaptive run should have taken larger steps on average.
        assert!(b.stats.steps < a.stats.steps);
    }

    #[test]
    fn density_matrix_constructor_rejects_invalid_states() {
        // Not Hermitian.
        let mut m: Array2<Complex64> = Array2::zeros((4, 4));
        m[[0, 0]] = c(1.0, 0.0);
        m[[0, 1]] = c(0.3, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        // Wrong trace.
        let mut m: Array2<Complex64> = Array2::zeros((4, 4));
        m[[0, 0]] = c(2.0, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        // Negative eigenvalue.
        let mut m: Array2<Complex64> = Array2::zeros((4, 4));
        m[[0, 0]] = c(1.5, 0.0);
        m[[1, 1]] = c(-0.5, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        // Bad vector norm and bad basis index.
        assert!(DensityMatrix::from_pure(&[c(1.0, 0.0), c(0.5, 0.0)]).is_err());
        assert!(DensityMatrix::basis_state(4, 4).is_err());
        // A valid maximally entangled state.
        let bell = DensityMatrix::bell_gg_ee();
        assert!((bell.populations()[0] - 0.5).abs() < 1e-15);
        assert!((bell.populations()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unequal_diagonal_rates_are_flagged() {
        let rho0 = DensityMatrix::basis_state(4, 3).unwrap();
        let cfg = EvolutionConfig::fixed(1.0, 1.3).unwrap();
        let uneven = sample_rates();
        let traj = evolve(
            &rho0,
            Generator::Rates(&uneven),
            &DriveParams::default(),
            &cfg,
        )
        .unwrap();
        assert!(traj.stats.unequal_diagonal_rates);
        let even =
            CouplingRates::two_qubit([[1.0, 0.2], [0.2, 1.0]], [[0.0, 0.0], [0.0, 0.0]]).unwrap();
        let traj = evolve(
            &rho0,
            Generator::Rates(&even),
            &DriveParams::default(),
            &cfg,
        )
        .unwrap();
        assert!(!traj.stats.unequal_diagonal_rates);
    }
}

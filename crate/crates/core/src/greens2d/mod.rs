// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Semi-analytic field of a magnetic line source above a magnetized plasma
//! half-space.
//!
//! Geometry: the plasma fills y > 0, an opaque medium fills y < 0, and a unit
//! magnetic line current sits at (0, d) inside the plasma. The TM field at
//! height y splits into an incident cylindrical wave, a reflected spectral
//! integral over the interface, and (as an approximation to the latter) the
//! discrete surface-wave pole terms. Normalized coupling-rate profiles for
//! the emitter pair are read off the real and imaginary parts of the total
//! field along the line y = d.
//!
//! The spectral integral runs along the real kx axis, truncated at
//! `|kx| = 40 k0` with an exponential tail estimate folded into the reported
//! error. Near-axis poles of the reflection coefficient are located first and
//! subtracted from the integrand; their closed-form contribution over the
//! truncated interval is restored through principal-value logarithms. For a
//! lossless plasma the quadrature path runs through on-axis poles, so the
//! quadrature (and the incident term paired with it) uses a small
//! regularization collision rate `1e-5 * omega`; pole searches and residue
//! fields always use the true collision rate.

pub mod hankel;
pub mod quadrature;
mod rootfind;

pub use rootfind::Window;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::{C0, EPS0};
use crate::error::{Error, Result};
use crate::materials::{self, im_pos_sqrt, OpaqueMedium, PermittivityTensor, PlasmaParams};

/// Collision rate substituted for `nu = 0` when integrating along the real
/// axis, as a fraction of omega.
const NU_REG_FRAC: f64 = 1e-5;
/// Spectral truncation in units of k0.
const K_CUTOFF: f64 = 40.0;
/// Default relative quadrature tolerance.
const DEFAULT_REL_TOL: f64 = 1e-8;

/// Plasma half-space over an opaque substrate, with the line source at
/// (0, `source_height`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceGeometry {
    pub plasma: PlasmaParams,
    pub opaque: OpaqueMedium,
    /// Source height d above the interface (m).
    pub source_height: f64,
}

impl InterfaceGeometry {
    pub fn new(plasma: PlasmaParams, opaque: OpaqueMedium, source_height: f64) -> Result<Self> {
        let g = InterfaceGeometry { plasma, opaque, source_height };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        self.plasma.validate()?;
        self.opaque.validate()?;
        if !(self.source_height > 0.0) || !self.source_height.is_finite() {
            return Err(Error::validation(
                "interface geometry: source height must be positive",
            ));
        }
        Ok(())
    }
}

/// Surface-wave pole of the reflection coefficient.
#[derive(Debug, Clone, Copy)]
pub struct SppPole {
    /// Complex wavenumber along the interface (rad/m).
    pub kx: Complex64,
    /// Residue of the reflection coefficient at `kx`.
    pub residue: Complex64,
    /// +1 for a right-going pole (Re kx >= 0), -1 for left-going.
    pub direction: i8,
}

/// Total, residue-only and incident field samples along an x grid.
#[derive(Debug, Clone)]
pub struct FieldProfile {
    pub x: Vec<f64>,
    pub hz_total: Vec<Complex64>,
    pub hz_residue: Vec<Complex64>,
    pub hz_incident: Vec<Complex64>,
    /// Reported absolute quadrature error of each total-field sample.
    pub quad_abs_error: Vec<f64>,
}

/// Normalized rate profiles along the interface; both are ratios against the
/// self point and feed the coupling-rate construction directly.
#[derive(Debug, Clone)]
pub struct RatesProfile {
    pub x: Vec<f64>,
    pub gamma_ratio: Vec<f64>,
    pub g_ratio: Vec<f64>,
}

/// Frequency-level quantities shared by every spectral evaluation.
#[derive(Debug, Clone, Copy)]
struct SpectralContext {
    k0: f64,
    eps: PermittivityTensor,
    /// TM effective permittivity of the plasma.
    ee: Complex64,
    em: Complex64,
    /// Line-source amplitude i omega eps0 eps_eff.
    a0: Complex64,
}

fn context(geom: &InterfaceGeometry, omega: f64, nu_override: Option<f64>) -> Result<SpectralContext> {
    geom.validate()?;
    let plasma = PlasmaParams {
        nu: nu_override.unwrap_or(geom.plasma.nu),
        ..geom.plasma
    };
    let eps = materials::permittivity(&plasma, omega)?;
    let ee = eps.eps_eff()?;
    let k0 = omega / C0;
    let a0 = Complex64::new(0.0, 1.0) * omega * EPS0 * ee;
    Ok(SpectralContext { k0, eps, ee, em: geom.opaque.eps, a0 })
}

/// Vertical decay rate gamma = sqrt(kx^2 - eps k0^2) on the Re >= 0 branch.
fn gamma_decay(eps: Complex64, k0: f64, kx: Complex64) -> Complex64 {
    -Complex64::new(0.0, 1.0) * im_pos_sqrt(eps * k0 * k0 - kx * kx)
}

/// Numerator, denominator and both decay rates of the reflection coefficient.
fn r0_parts(ctx: &SpectralContext, kx: Complex64) -> (Complex64, Complex64, Complex64, Complex64) {
    let gp = gamma_decay(ctx.ee, ctx.k0, kx);
    let gm = gamma_decay(ctx.em, ctx.k0, kx);
    let bias = ctx.eps.e12 * kx / (ctx.eps.e11 * ctx.ee);
    let n = gp / ctx.ee - bias - gm / ctx.em;
    let d = gp / ctx.ee + bias + gm / ctx.em;
    (n, d, gp, gm)
}

/// TM reflection coefficient of the interface at spectral wavenumber `kx`.
pub fn reflection_coefficient(geom: &InterfaceGeometry, kx: Complex64, omega: f64) -> Result<Complex64> {
    let ctx = context(geom, omega, None)?;
    let (n, d, gp, gm) = r0_parts(&ctx, kx);
    let scale = (gp / ctx.ee).norm()
        + (ctx.eps.e12 * kx / (ctx.eps.e11 * ctx.ee)).norm()
        + (gm / ctx.em).norm();
    if d.norm() < 1e-10 * scale {
        return Err(Error::numerical(
            "reflection coefficient: kx lies on the surface-wave dispersion curve",
        ));
    }
    Ok(n / d)
}

/// Residue of R0 at a simple zero `p` of its denominator, via a Richardson
/// extrapolated central difference of the denominator.
fn residue_r0(ctx: &SpectralContext, p: Complex64) -> Result<Complex64> {
    let h = Complex64::new(1e-6 * ctx.k0, 0.0);
    let den = |k: Complex64| r0_parts(ctx, k).1;
    let d1 = (den(p + h) - den(p - h)) / (2.0 * h);
    let d2 = (den(p + 0.5 * h) - den(p - 0.5 * h)) / h;
    let deriv = (4.0 * d2 - d1) / 3.0;
    if deriv.norm() == 0.0 || !deriv.is_finite() {
        return Err(Error::numerical(
            "pole residue: denominator derivative vanished (degenerate root)",
        ));
    }
    Ok(r0_parts(ctx, p).0 / deriv)
}

/// Search window covering every surface-wave pole the spectral integral can
/// feel: `|Re kx| <= 8 k0`, `|Im kx| <= 0.3 k0`.
pub fn default_search_window(omega: f64) -> Window {
    let k0 = omega / C0;
    Window {
        re_min: -8.0 * k0,
        re_max: 8.0 * k0,
        im_min: -0.3 * k0,
        im_max: 0.3 * k0,
    }
}

/// Locate the surface-wave poles of the reflection coefficient inside a
/// rectangular window of the complex kx plane. Uses the true collision rate;
/// for a lossless plasma the poles are real.
pub fn find_spp_poles(geom: &InterfaceGeometry, omega: f64, window: &Window) -> Result<Vec<SppPole>> {
    let ctx = context(geom, omega, None)?;
    poles_in_window(&ctx, window)
}

fn poles_in_window(ctx: &SpectralContext, window: &Window) -> Result<Vec<SppPole>> {
    window.validate()?;
    let den = |kx: Complex64| r0_parts(ctx, kx).1;
    let n_re = (((window.re_max - window.re_min) / ctx.k0 * 20.0).ceil() as usize).max(8);
    // Odd cell count keeps Im kx = 0 off the grid lines: lossless poles sit
    // exactly on the real axis and must fall inside a cell, not on its edge.
    let n_im = ((((window.im_max - window.im_min) / ctx.k0 * 40.0).ceil() as usize).max(8)) | 1;
    let zeros = rootfind::find_zeros_winding(&den, window, n_re, n_im, 1e-9 * ctx.k0)?;
    let mut poles = Vec::new();
    for z in zeros {
        let (n, d, _, _) = r0_parts(ctx, z);
        // Root tolerance from the module contract; polished roots that fail
        // it are spurious crossings, not poles.
        if d.norm() > 1e-8 * n.norm() {
            continue;
        }
        let residue = residue_r0(ctx, z)?;
        let direction = if z.re >= 0.0 { 1 } else { -1 };
        poles.push(SppPole { kx: z, residue, direction });
    }
    poles.sort_by(|a, b| a.kx.re.total_cmp(&b.kx.re));
    Ok(poles)
}

fn incident_with_ctx(ctx: &SpectralContext, d: f64, x: f64, y: f64) -> Result<Complex64> {
    let rho = (x * x + (y - d) * (y - d)).sqrt();
    if rho == 0.0 {
        return Err(Error::validation(
            "incident field: evaluation point coincides with the source",
        ));
    }
    let kt = im_pos_sqrt(ctx.ee) * ctx.k0;
    let h = hankel::hankel0_first(kt * rho)?;
    Ok(ctx.a0 / Complex64::new(0.0, -4.0) * h)
}

/// Field of the line source alone (no interface): an outgoing cylindrical
/// wave in the effective TM medium.
pub fn incident_field(geom: &InterfaceGeometry, x: f64, y: f64, omega: f64) -> Result<Complex64> {
    let ctx = context(geom, omega, None)?;
    incident_with_ctx(&ctx, geom.source_height, x, y)
}

/// Spectral integrand of the reflected field (before the a0 / 2 pi factor).
fn spectral_term(ctx: &SpectralContext, yd: f64, x: f64, kx: Complex64) -> Complex64 {
    let (n, d, gp, _) = r0_parts(ctx, kx);
    n / d * (-gp * yd + Complex64::new(0.0, 1.0) * kx * x).exp() / (2.0 * gp)
}

/// Regularized spectral context plus the near-axis poles subtracted from the
/// quadrature; built once per (geometry, frequency) and reused across grid
/// points.
struct SommerfeldEngine {
    ctx: SpectralContext,
    d: f64,
    /// (pole, residue of R0 there) in the regularized problem.
    subs: Vec<(Complex64, Complex64)>,
}

fn engine(geom: &InterfaceGeometry, omega: f64) -> Result<SommerfeldEngine> {
    let nu = if geom.plasma.nu > 0.0 { geom.plasma.nu } else { NU_REG_FRAC * omega };
    let ctx = context(geom, omega, Some(nu))?;
    let window = default_search_window(omega);
    let subs = poles_in_window(&ctx, &window)?
        .into_iter()
        .map(|p| (p.kx, p.residue))
        .collect();
    Ok(SommerfeldEngine { ctx, d: geom.source_height, subs })
}

impl SommerfeldEngine {
    /// Total field at one point with its absolute error estimate
    /// (quadrature error plus spectral tail bound, in field units).
    fn field_at(&self, x: f64, y: f64, rel_tol: f64) -> Result<(Complex64, f64)> {
        let ctx = &self.ctx;
        let big_k = K_CUTOFF * ctx.k0;
        let yd = y + self.d;

        // Position-dependent pole coefficients rp; the subtracted integrand
        // is smooth and the removed part integrates to rp * Log terms.
        let rp: Vec<(Complex64, Complex64)> = self
            .subs
            .iter()
            .map(|&(p, res)| {
                let gp = gamma_decay(ctx.ee, ctx.k0, p);
                let coeff = res * (-gp * yd + Complex64::new(0.0, 1.0) * p * x).exp() / (2.0 * gp);
                (p, coeff)
            })
            .collect();
        let f = |t: f64| {
            let kx = Complex64::new(t, 0.0);
            let mut v = spectral_term(ctx, yd, x, kx);
            for &(p, r) in &rp {
                v -= r / (kx - p);
            }
            v
        };

        // Panels split at 0, the pole positions and the lateral-wavenumber
        // branch scales of either medium.
        let mut bps = vec![-big_k, 0.0, big_k];
        for &(p, _) in &rp {
            bps.push(p.re);
        }
        for branch in [im_pos_sqrt(ctx.ee), im_pos_sqrt(ctx.em)] {
            let b = branch.re.abs() * ctx.k0;
            if b > 1e-9 * ctx.k0 {
                bps.push(b);
                bps.push(-b);
            }
        }
        bps.retain(|b| b.abs() < big_k * (1.0 - 1e-12));
        bps.push(-big_k);
        bps.push(big_k);
        bps.sort_by(f64::total_cmp);
        bps.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * big_k);

        let coeff_scale: f64 = rp.iter().map(|&(_, r)| r.norm()).sum();
        let abs_tol = 1e-14 * coeff_scale;
        let quad = quadrature::integrate_panels(&f, &bps, rel_tol, abs_tol)?;

        let mut integral = quad.value;
        for &(p, r) in &rp {
            integral += r * ((big_k - p).ln() - (-big_k - p).ln());
        }
        // Beyond the cutoff the integrand decays at least like e^{-kx yd}.
        let tail = (spectral_term(ctx, yd, x, Complex64::new(big_k, 0.0)).norm()
            + spectral_term(ctx, yd, x, Complex64::new(-big_k, 0.0)).norm())
            / yd;

        let pref = ctx.a0 / (2.0 * std::f64::consts::PI);
        let hz_ref = pref * integral;
        let err = pref.norm() * (quad.abs_error + tail);
        let hz_inc = incident_with_ctx(ctx, self.d, x, y)?;
        Ok((hz_inc + hz_ref, err))
    }
}

fn check_field_point(y: f64, rel_tol: f64) -> Result<()> {
    if !(y >= 0.0) || !y.is_finite() {
        return Err(Error::validation(
            "field evaluation: y must be in the plasma half-space (y >= 0)",
        ));
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::validation(
            "field evaluation: relative tolerance must lie in (0, 1)",
        ));
    }
    Ok(())
}

/// Total field (incident plus reflected spectral integral) at one point,
/// converged to the default relative tolerance.
pub fn sommerfeld_field(geom: &InterfaceGeometry, x: f64, y: f64, omega: f64) -> Result<Complex64> {
    Ok(sommerfeld_field_tol(geom, x, y, omega, DEFAULT_REL_TOL)?.0)
}

/// As [`sommerfeld_field`] at a caller-chosen relative quadrature tolerance;
/// also returns the absolute error estimate of the sample.
pub fn sommerfeld_field_tol(
    geom: &InterfaceGeometry,
    x: f64,
    y: f64,
    omega: f64,
    rel_tol: f64,
) -> Result<(Complex64, f64)> {
    check_field_point(y, rel_tol)?;
    engine(geom, omega)?.field_at(x, y, rel_tol)
}

/// Discrete pole contribution to the field: each pole radiates only into its
/// own half (right-going poles into x > 0), which makes this part alone
/// discontinuous at x = 0.
pub fn residue_field(
    geom: &InterfaceGeometry,
    poles: &[SppPole],
    x: f64,
    y: f64,
    omega: f64,
) -> Result<Complex64> {
    let ctx = context(geom, omega, None)?;
    let yd = y + geom.source_height;
    let mut hz = Complex64::new(0.0, 0.0);
    for p in poles {
        let active = if p.direction >= 0 { x > 0.0 } else { x < 0.0 };
        if !active {
            continue;
        }
        let gp = gamma_decay(ctx.ee, ctx.k0, p.kx);
        hz += Complex64::new(0.0, 1.0) * ctx.a0 * p.residue
            * (-gp * yd + Complex64::new(0.0, 1.0) * p.kx * x).exp()
            / (2.0 * gp);
    }
    Ok(hz)
}

/// Total, residue and incident field along an x grid at height `y`.
/// Grid points are independent and evaluated in parallel.
pub fn field_profile(
    geom: &InterfaceGeometry,
    x_grid: &[f64],
    y: f64,
    omega: f64,
    rel_tol: f64,
) -> Result<FieldProfile> {
    check_field_point(y, rel_tol)?;
    let eng = engine(geom, omega)?;
    let poles = find_spp_poles(geom, omega, &default_search_window(omega))?;
    let rows: Vec<(Complex64, f64, Complex64, Complex64)> = x_grid
        .par_iter()
        .map(|&x| {
            let (total, err) = eng.field_at(x, y, rel_tol)?;
            let res = residue_field(geom, &poles, x, y, omega)?;
            let inc = incident_with_ctx(&eng.ctx, geom.source_height, x, y)?;
            Ok((total, err, res, inc))
        })
        .collect::<Result<_>>()?;
    let mut profile = FieldProfile {
        x: x_grid.to_vec(),
        hz_total: Vec::with_capacity(rows.len()),
        hz_residue: Vec::with_capacity(rows.len()),
        hz_incident: Vec::with_capacity(rows.len()),
        quad_abs_error: Vec::with_capacity(rows.len()),
    };
    for (total, err, res, inc) in rows {
        profile.hz_total.push(total);
        profile.hz_residue.push(res);
        profile.hz_incident.push(inc);
        profile.quad_abs_error.push(err);
    }
    Ok(profile)
}

/// Normalized dissipative and coherent rate profiles along the line y = d.
///
/// gamma_ratio(x) = Re Hz(x) / Re Hz(x_self) and
/// g_ratio(x) = -Im Hz(x) / (2 Re Hz(x_self)), with the self point offset to
/// x_self = lambda0 / 100 to stay clear of the source singularity.
pub fn normalized_rates_profile(
    geom: &InterfaceGeometry,
    x_grid: &[f64],
    omega: f64,
) -> Result<RatesProfile> {
    let eng = engine(geom, omega)?;
    let y = geom.source_height;
    let x_self = self_offset(omega);
    let (hz_self, _) = eng.field_at(x_self, y, DEFAULT_REL_TOL)?;
    if hz_self.re.abs() < 1e-12 * hz_self.norm() {
        return Err(Error::numerical(
            "rates profile: self field has no real part to normalize by",
        ));
    }
    let samples: Vec<Complex64> = x_grid
        .par_iter()
        .map(|&x| Ok(eng.field_at(x, y, DEFAULT_REL_TOL)?.0))
        .collect::<Result<_>>()?;
    Ok(RatesProfile {
        x: x_grid.to_vec(),
        gamma_ratio: samples.iter().map(|h| h.re / hz_self.re).collect(),
        g_ratio: samples.iter().map(|h| -h.im / (2.0 * hz_self.re)).collect(),
    })
}

/// Self-point offset lambda0 / 100 used to proxy the on-site rate.
pub fn self_offset(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * C0 / omega / 100.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const OMEGA0: f64 = 2.0 * std::f64::consts::PI * 200e12;

    fn lam0(omega: f64) -> f64 {
        2.0 * std::f64::consts::PI * C0 / omega
    }

    /// Biased in-gap bench case: omega_p = 0.95 w, omega_c = 0.21 w,
    /// lossless, opaque permittivity -2, source at lambda0 / 10.
    fn canonical(omega_c_frac: f64, nu: f64) -> InterfaceGeometry {
        InterfaceGeometry::new(
            PlasmaParams::new(0.95 * OMEGA0, omega_c_frac * OMEGA0, nu).unwrap(),
            OpaqueMedium { eps: Complex64::new(-2.0, 0.0) },
            lam0(OMEGA0) / 10.0,
        )
        .unwrap()
    }

    fn rel_diff(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn in_gap_single_pole_and_residue() {
        let geom = canonical(0.21, 0.0);
        let k0 = OMEGA0 / C0;
        let poles = find_spp_poles(&geom, OMEGA0, &default_search_window(OMEGA0)).unwrap();
        assert_eq!(poles.len(), 1);
        let p = poles[0];
        assert_relative_eq!(p.kx.re / k0, 0.38517843528393117, max_relative = 1e-9);
        assert!(p.kx.im.abs() / k0 < 1e-9);
        assert_relative_eq!(p.residue.re / k0, -0.58851267204606995, max_relative = 1e-6);
        assert!(p.residue.im.abs() / k0 < 1e-6);
        assert_eq!(p.direction, 1);
    }

    #[test]
    fn pec_limit_pole_matches_dispersion() {
        let geom = InterfaceGeometry::new(
            PlasmaParams::new(0.95 * OMEGA0, 0.21 * OMEGA0, 0.0).unwrap(),
            OpaqueMedium { eps: Complex64::new(-1e9, 0.0) },
            lam0(OMEGA0) / 10.0,
        )
        .unwrap();
        let k0 = OMEGA0 / C0;
        let poles = find_spp_poles(&geom, OMEGA0, &default_search_window(OMEGA0)).unwrap();
        assert_eq!(poles.len(), 1);
        let kx = poles[0].kx / k0;
        assert_relative_eq!(kx.re, 0.23636105410203462, max_relative = 1e-8);
        // In this limit the dispersion closes at k0 sqrt(e11).
        let e11 = materials::permittivity(&geom.plasma, OMEGA0).unwrap().e11;
        let target = e11.sqrt();
        assert!((kx - target).norm() / target.norm() < 1e-4);
        // On the dispersion curve the reflection coefficient itself blows up.
        assert!(reflection_coefficient(&geom, poles[0].kx, OMEGA0).is_err());
    }

    #[test]
    fn above_gap_two_unequal_poles() {
        // Canonical biased slab probed above its upper band edge (1.06 w0),
        // where the bulk propagates again and both interface waves exist.
        let omega = 1.15 * OMEGA0;
        let geom = InterfaceGeometry::new(
            PlasmaParams::new(0.95 * OMEGA0, 0.21 * OMEGA0, 0.0).unwrap(),
            OpaqueMedium { eps: Complex64::new(-0.47, 0.0) },
            lam0(omega) / 10.0,
        )
        .unwrap();
        let k0 = omega / C0;
        let poles = find_spp_poles(&geom, omega, &default_search_window(omega)).unwrap();
        assert_eq!(poles.len(), 2);
        assert_relative_eq!(poles[0].kx.re / k0, -0.52898568646618558, max_relative = 1e-8);
        assert_relative_eq!(poles[1].kx.re / k0, 2.0494228549662905, max_relative = 1e-8);
        assert_relative_eq!(poles[0].residue.re / k0, -0.15227160585071352, max_relative = 1e-6);
        assert_relative_eq!(poles[1].residue.re / k0, 35.594590306894574, max_relative = 1e-6);
        assert_eq!(poles[0].direction, -1);
        assert_eq!(poles[1].direction, 1);
        // Counterpropagating surface waves with unequal wavelengths.
        assert!((poles[0].kx.norm() - poles[1].kx.norm()).abs() > 0.5 * k0);
    }

    #[test]
    fn unbiased_poles_come_in_pairs() {
        let geom = canonical(0.0, 0.0);
        let k0 = OMEGA0 / C0;
        let poles = find_spp_poles(&geom, OMEGA0, &default_search_window(OMEGA0)).unwrap();
        assert_eq!(poles.len(), 2);
        assert!((poles[0].kx + poles[1].kx).norm() < 1e-10 * k0);
        assert_relative_eq!(poles[1].kx.re / k0, 0.3201510817, max_relative = 1e-7);
    }

    #[test]
    fn reflection_symmetry_follows_bias() {
        let k0 = OMEGA0 / C0;
        let unbiased = canonical(0.0, 0.0);
        for kx in [
            Complex64::new(1.5 * k0, 0.0),
            Complex64::new(0.4 * k0, 0.2 * k0),
            Complex64::new(-3.0 * k0, -0.1 * k0),
        ] {
            let a = reflection_coefficient(&unbiased, kx, OMEGA0).unwrap();
            let b = reflection_coefficient(&unbiased, -kx, OMEGA0).unwrap();
            assert!(rel_diff(a, b) < 1e-13);
        }
        let biased = canonical(0.21, 0.0);
        let a = reflection_coefficient(&biased, Complex64::new(1.5 * k0, 0.0), OMEGA0).unwrap();
        let b = reflection_coefficient(&biased, Complex64::new(-1.5 * k0, 0.0), OMEGA0).unwrap();
        assert!(rel_diff(a, b) > 1e-3);
    }

    #[test]
    fn incident_field_reciprocal_and_decaying() {
        let geom = canonical(0.21, 0.0);
        let l = lam0(OMEGA0);
        let y = geom.source_height;
        for x in [0.3 * l, 0.9 * l, 2.1 * l] {
            let a = incident_field(&geom, x, y, OMEGA0).unwrap();
            let b = incident_field(&geom, -x, y, OMEGA0).unwrap();
            assert_eq!(a, b);
        }
        // In the gap the effective permittivity is negative and the source
        // field is evanescent.
        let h1 = incident_field(&geom, 0.5 * l, y, OMEGA0).unwrap().norm();
        let h2 = incident_field(&geom, 1.0 * l, y, OMEGA0).unwrap().norm();
        let h3 = incident_field(&geom, 2.0 * l, y, OMEGA0).unwrap().norm();
        assert!(h1 > 4.0 * h2 && h2 > 8.0 * h3);
        assert!(incident_field(&geom, 0.0, y, OMEGA0).is_err());
    }

    #[test]
    fn incident_field_spreads_cylindrically_above_gap() {
        let omega = 1.15 * OMEGA0;
        let geom = InterfaceGeometry::new(
            PlasmaParams::new(0.95 * OMEGA0, 0.21 * OMEGA0, 0.0).unwrap(),
            OpaqueMedium { eps: Complex64::new(-0.47, 0.0) },
            lam0(omega) / 10.0,
        )
        .unwrap();
        let l = lam0(omega);
        let y = geom.source_height;
        let h1 = incident_field(&geom, 50.0 * l, y, omega).unwrap().norm();
        let h2 = incident_field(&geom, 100.0 * l, y, omega).unwrap().norm();
        assert_relative_eq!(h1 / h2, (100.0f64 / 50.0).sqrt(), max_relative = 1e-2);
    }

    #[test]
    fn biased_field_anchors() {
        let geom = canonical(0.21, 0.0);
        let l = lam0(OMEGA0);
        let y = geom.source_height;
        let cases = [
            (0.01, Complex64::new(-407.099112415385, -3174.28602700735), 2e-6),
            (-0.01, Complex64::new(-368.726383218, -3155.539853), 2e-6),
            (0.5, Complex64::new(-263.154051366116, -738.3833280651), 2e-6),
            (1.6, Complex64::new(576.701598393868, 516.857895106975), 2e-6),
            (-0.5, Complex64::new(-10.1417318079738, -13.6819830450008), 1e-3),
            (-1.6, Complex64::new(-0.00955501740762849, -0.00894800277375052), 1e-2),
        ];
        for (xf, want, tol) in cases {
            let hz = sommerfeld_field(&geom, xf * l, y, OMEGA0).unwrap();
            assert!(
                rel_diff(hz, want) < tol,
                "x = {xf} lam0: got {hz}, want {want}"
            );
        }
        // One-way surface wave: the right side carries the field.
        let right = sommerfeld_field(&geom, 1.6 * l, y, OMEGA0).unwrap().norm();
        let left = sommerfeld_field(&geom, -1.6 * l, y, OMEGA0).unwrap().norm();
        assert!(right / left > 1e4);
    }

    #[test]
    fn unbiased_field_is_symmetric() {
        let geom = canonical(0.0, 0.0);
        let l = lam0(OMEGA0);
        let y = geom.source_height;
        let want = Complex64::new(-424.62894876557268, -162.48152809708832);
        let a = sommerfeld_field(&geom, 0.5 * l, y, OMEGA0).unwrap();
        let b = sommerfeld_field(&geom, -0.5 * l, y, OMEGA0).unwrap();
        assert!(rel_diff(a, want) < 1e-5);
        assert!(rel_diff(a, b) < 1e-7);
    }

    #[test]
    fn residue_field_step_and_jump() {
        let geom = canonical(0.21, 0.0);
        let l = lam0(OMEGA0);
        let y = geom.source_height;
        let poles = find_spp_poles(&geom, OMEGA0, &default_search_window(OMEGA0)).unwrap();
        // Single right-going pole: nothing radiates into x < 0.
        for x in [-0.3, -1.0, -2.5] {
            let hz = residue_field(&geom, &poles, x * l, y, OMEGA0).unwrap();
            assert_eq!(hz, Complex64::new(0.0, 0.0));
        }
        // Jump at the origin equals the one-sided limit; with a lossless
        // slab every factor in the pole term is real.
        let jump = residue_field(&geom, &poles, 1e-9 * l, y, OMEGA0).unwrap();
        assert!(rel_diff(jump, Complex64::new(-774.57718782923373, 0.0)) < 1e-5);
    }

    #[test]
    fn residue_approximates_field_away_from_source() {
        let geom = canonical(0.21, 0.0);
        let l = lam0(OMEGA0);
        let y = geom.source_height;
        let poles = find_spp_poles(&geom, OMEGA0, &default_search_window(OMEGA0)).unwrap();
        // On the pole side the continuum decays within a wavelength.
        for x in [1.2, 1.6, 2.0, 3.0] {
            let total = sommerfeld_field(&geom, x * l, y, OMEGA0).unwrap();
            let inc = incident_field(&geom, x * l, y, OMEGA0).unwrap();
            let res = residue_field(&geom, &poles, x * l, y, OMEGA0).unwrap();
            assert!((total - inc - res).norm() / res.norm() < 0.05, "x = {x} lam0");
        }
    }

    #[test]
    fn total_field_continuous_where_residue_jumps() {
        let geom = canonical(0.21, 0.0);
        let l = lam0(OMEGA0);
        let y = geom.source_height;
        let d1 = (sommerfeld_field(&geom, 0.01 * l, y, OMEGA0).unwrap()
            - sommerfeld_field(&geom, -0.01 * l, y, OMEGA0).unwrap())
        .norm();
        let d2 = (sommerfeld_field(&geom, 0.002 * l, y, OMEGA0).unwrap()
            - sommerfeld_field(&geom, -0.002 * l, y, OMEGA0).unwrap())
        .norm();
        // Sample differences shrink linearly with the offset (continuous
        // field with finite slope), while the residue part jumps by ~775.
        assert_relative_eq!(d1, 42.7, max_relative = 0.03);
        assert_relative_eq!(d1 / d2, 5.0, max_relative = 0.2);
    }

    #[test]
    fn rates_profile_canonical_values() {
        let geom = canonical(0.21, 0.0);
        let l = lam0(OMEGA0);
        let grid = [self_offset(OMEGA0), 1.6 * l];
        let prof = normalized_rates_profile(&geom, &grid, OMEGA0).unwrap();
        assert!((prof.gamma_ratio[0] - 1.0).abs() < 1e-12);
        assert_relative_eq!(prof.gamma_ratio[1], -1.41661227157241, max_relative = 1e-5);
        assert_relative_eq!(prof.g_ratio[1], 0.634805971499636, max_relative = 1e-5);
    }

    #[test]
    fn rates_profile_exceeds_self_rate_under_bias() {
        let geom = canonical(0.21, 0.0);
        let l = lam0(OMEGA0);
        let grid: Vec<f64> = (2..=20).map(|i| 0.1 * i as f64 * l).collect();
        let prof = normalized_rates_profile(&geom, &grid, OMEGA0).unwrap();
        let max = prof.gamma_ratio.iter().cloned().fold(f64::MIN, f64::max);
        assert!(max > 1.0, "max gamma ratio {max}");
    }

    #[test]
    fn unbiased_rates_profile_symmetric() {
        let geom = canonical(0.0, 0.0);
        let l = lam0(OMEGA0);
        let prof = normalized_rates_profile(&geom, &[0.7 * l, -0.7 * l], OMEGA0).unwrap();
        assert_relative_eq!(prof.gamma_ratio[0], prof.gamma_ratio[1], max_relative = 1e-7);
        assert_relative_eq!(prof.g_ratio[0], prof.g_ratio[1], max_relative = 1e-7);
    }

    #[test]
    fn field_profile_columns_consistent() {
        let geom = canonical(0.21, 0.0);
        let l = lam0(OMEGA0);
        let y = geom.source_height;
        let grid = [-0.02 * l, -0.01 * l, 0.01 * l, 0.02 * l];
        let prof = field_profile(&geom, &grid, y, OMEGA0, 1e-6).unwrap();
        assert_eq!(prof.x.len(), 4);
        assert_eq!(prof.hz_total.len(), 4);
        assert_eq!(prof.hz_residue.len(), 4);
        assert_eq!(prof.hz_incident.len(), 4);
        assert_eq!(prof.quad_abs_error.len(), 4);
        for (i, hz) in prof.hz_total.iter().enumerate() {
            assert!(hz.is_finite());
            assert!(prof.quad_abs_error[i] < 1e-3 * hz.norm());
        }
        // Residue column switches on across the origin, totals stay close.
        assert_eq!(prof.hz_residue[1], Complex64::new(0.0, 0.0));
        assert!(prof.hz_residue[2].norm() > 700.0);
        assert!((prof.hz_total[2] - prof.hz_total[1]).norm() < 50.0);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let geom = canonical(0.21, 0.0);
        let lam = lam0(OMEGA0);
        assert!(sommerfeld_field(&geom, 0.1 * lam, -1e-6, OMEGA0).is_err());
        assert!(sommerfeld_field_tol(&geom, 0.1 * lam, geom.source_height, OMEGA0, 0.0).is_err());
        assert!(InterfaceGeometry::new(geom.plasma, geom.opaque, 0.0).is_err());
        let bad = Window { re_min: 1.0, re_max: -1.0, im_min: 0.0, im_max: 1.0 };
        assert!(find_spp_poles(&geom, OMEGA0, &bad).is_err());
    }
}

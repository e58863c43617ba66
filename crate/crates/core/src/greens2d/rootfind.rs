// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Complex root finding: Muller iterations polished from candidate cells
//! selected by phase winding of the function on a rectangular grid.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Rectangle in the complex plane.
#[derive(Debug, Clone, Copy)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn validate(&self) -> Result<()> {
        if !(self.re_min < self.re_max) || !(self.im_min < self.im_max) {
            return Err(Error::validation("window: empty rectangle"));
        }
        Ok(())
    }

    fn contains(&self, z: Complex64, margin: f64) -> bool {
        z.re >= self.re_min - margin
            && z.re <= self.re_max + margin
            && z.im >= self.im_min - margin
            && z.im <= self.im_max + margin
    }
}

/// Muller's method from a single seed. `scale` sets the initial bracket and
/// the convergence length; iteration stops when the step falls below
/// 1e-14 * scale.
pub fn muller<F>(f: &F, seed: Complex64, scale: f64, max_iter: usize) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(scale > 0.0) {
        return Err(Error::validation("muller: scale must be positive"));
    }
    let h = 1e-3 * scale;
    let mut x0 = seed + Complex64::new(h, 0.0);
    let mut x1 = seed - Complex64::new(0.5 * h, 0.7 * h);
    let mut x2 = seed;
    let mut f0 = f(x0);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        let q = (x2 - x1) / (x1 - x0);
        let a = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
        let b = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
        let c = (1.0 + q) * f2;
        let disc = (b * b - 4.0 * a * c).sqrt();
        let den = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
        if den.norm() == 0.0 {
            return Err(Error::numerical("muller: degenerate step"));
        }
        let step = -(x2 - x1) * 2.0 * c / den;
        let x3 = x2 + step;
        let f3 = f(x3);
        if !f3.re.is_finite() || !f3.im.is_finite() {
            return Err(Error::numerical("muller: function not finite"));
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        x2 = x3;
        f2 = f3;
        if step.norm() <= 1e-14 * scale.max(x2.norm()) || f2.norm() == 0.0 {
            return Ok(x2);
        }
    }
    Err(Error::numerical("muller: no convergence"))
}

/// All simple zeros of `f` inside `window`, located by phase winding on an
/// `n_re` x `n_im` cell grid and polished by Muller's method.
///
/// A cell whose boundary winds by two or more turns holds a multiple or
/// clustered root the grid cannot separate; that is an error, not a silent
/// merge. Candidates that fail to polish are dropped; callers verify the
/// survivors against their own tolerance.
pub fn find_zeros_winding<F>(
    f: &F,
    window: &Window,
    n_re: usize,
    n_im: usize,
    min_separation: f64,
) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Complex64,
{
    window.validate()?;
    if n_re < 2 || n_im < 2 {
        return Err(Error::validation("winding grid: need at least 2x2 cells"));
    }
    let dre = (window.re_max - window.re_min) / n_re as f64;
    let dim = (window.im_max - window.im_min) / n_im as f64;

    // Phase of f on grid corners plus the midpoints of horizontal edges.
    // A simple zero can never advance the phase by more than pi along one
    // boundary segment, but a double zero can; the midpoints keep each
    // segment's sweep below pi so a 4 pi winding is counted, not aliased
    // away. No extra rows are added: callers place near-real poles between
    // rows on purpose.
    let w_fine = 2 * n_re + 1;
    let mut phases = vec![0.0f64; w_fine * (n_im + 1)];
    for j in 0..=n_im {
        for i in 0..w_fine {
            let z = Complex64::new(
                window.re_min + i as f64 * (0.5 * dre),
                window.im_min + j as f64 * dim,
            );
            let mut v = f(z);
            if v == Complex64::new(0.0, 0.0) {
                // A zero exactly on a sample point has no phase and would
                // corrupt the adjacent winding counts; sample just off it.
                v = f(z + Complex64::new(5e-10 * dre, 1e-9 * dim));
            }
            if !v.re.is_finite() || !v.im.is_finite() || v == Complex64::new(0.0, 0.0) {
                return Err(Error::numerical(format!(
                    "winding grid: function not finite at {z}"
                )));
            }
            phases[j * w_fine + i] = v.arg();
        }
    }
    let wrap = |d: f64| {
        let mut d = d;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        d
    };

    let scale = dre.hypot(dim);
    let mut roots: Vec<Complex64> = Vec::new();
    for j in 0..n_im {
        for i in 0..n_re {
            // Counterclockwise ring over the cell boundary, six segments.
            let ring = [
                phases[j * w_fine + 2 * i],
                phases[j * w_fine + 2 * i + 1],
                phases[j * w_fine + 2 * i + 2],
                phases[(j + 1) * w_fine + 2 * i + 2],
                phases[(j + 1) * w_fine + 2 * i + 1],
                phases[(j + 1) * w_fine + 2 * i],
            ];
            let mut w = 0.0;
            for s in 0..6 {
                w += wrap(ring[(s + 1) % 6] - ring[s]);
            }
            let turns = (w / (2.0 * std::f64::consts::PI)).round() as i64;
            if turns == 0 {
                continue;
            }
            if turns.abs() >= 2 {
                return Err(Error::numerical(format!(
                    "winding grid: {turns} roots merge in one cell near re={}, im={}; refine the grid",
                    window.re_min + (i as f64 + 0.5) * dre,
                    window.im_min + (j as f64 + 0.5) * dim
                )));
            }
            let center = Complex64::new(
                window.re_min + (i as f64 + 0.5) * dre,
                window.im_min + (j as f64 + 0.5) * dim,
            );
            let Ok(root) = muller(f, center, scale, 80) else {
                continue;
            };
            if !window.contains(root, 2.0 * scale) {
                continue;
            }
            if roots.iter().all(|r| (r - root).norm() > min_separation) {
                roots.push(root);
            }
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

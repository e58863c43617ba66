// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Hankel function of the first kind, order zero, for complex arguments off
//! the negative real axis.
//!
//! Ascending series for small arguments, large-argument asymptotic expansion
//! otherwise. In f64 the series loses about exp(|z| + Im z) of relative
//! accuracy to cancellation between the J0 and Y0 sums, while the asymptotic
//! expansion truncated at its smallest term bottoms out near
//! exp(-17 - 1.4 (|z| - 8)). Balancing the two error curves gives a straight
//! crossover line in the (|z|, Im z) plane rather than a fixed radius; the
//! worst case sits near the imaginary axis close to |z| = 9, where neither
//! branch does better than ~1e-8 relative. Away from that corner the result
//! is good to 1e-10 or better.

use num_complex::Complex64;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577215664901532860;
// Series below the line SLOPE |z| + Im z = OFFSET, asymptotic above; the
// coefficients equate the measured rounding floors of the two branches.
const SELECTOR_SLOPE: f64 = 2.38;
const SELECTOR_OFFSET: f64 = 29.8;

/// H0^(1)(z). Valid for z off the negative real axis; the in-gap evanescent
/// regime (positive imaginary z) and lossy upper-half-plane arguments are the
/// intended inputs.
pub fn hankel0_first(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::validation("hankel0: argument not finite"));
    }
    if z.norm() == 0.0 {
        return Err(Error::validation("hankel0: singular at z = 0"));
    }
    if z.re < 0.0 && z.im == 0.0 {
        return Err(Error::validation(
            "hankel0: branch cut on the negative real axis",
        ));
    }
    if SELECTOR_SLOPE * z.norm() + z.im < SELECTOR_OFFSET {
        Ok(series(z))
    } else {
        Ok(asymptotic(z))
    }
}

/// Ascending series: J0 + i Y0 with
/// J0 = sum (-q)^k/(k!)^2, q = z^2/4,
/// Y0 = (2/pi) [(ln(z/2) + gamma_E) J0 + sum_{k>=1} (-1)^{k+1} H_k q^k/(k!)^2].
fn series(z: Complex64) -> Complex64 {
    let q = z * z * 0.25;
    let mut term = Complex64::new(1.0, 0.0); // (-q)^k / (k!)^2
    let mut j0 = term;
    let mut ysum = Complex64::new(0.0, 0.0);
    let mut harmonic = 0.0;
    for k in 1..=60 {
        term = term * (-q) / ((k * k) as f64);
        harmonic += 1.0 / k as f64;
        j0 += term;
        ysum -= term * harmonic;
        if term.norm() * harmonic < 1e-18 * (j0.norm() + 1.0) {
            break;
        }
    }
    let y0 = std::f64::consts::FRAC_2_PI * (((z * 0.5).ln() + EULER_GAMMA) * j0 + ysum);
    j0 + Complex64::new(0.0, 1.0) * y0
}

/// Large-argument expansion sqrt(2/(pi z)) e^{i(z - pi/4)} sum_k t_k with
/// t_0 = 1, t_k = t_{k-1} (2k-1)^2 / (8k) * (-i/z), truncated at the
/// smallest term.
fn asymptotic(z: Complex64) -> Complex64 {
    let minus_i_over_z = Complex64::new(0.0, -1.0) / z;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev_mag = f64::INFINITY;
    for k in 1..=30u32 {
        let m = (2 * k - 1) as f64;
        term = term * (m * m / (8.0 * k as f64)) * minus_i_over_z;
        let mag = term.norm();
        if mag >= prev_mag {
            break;
        }
        sum += term;
        prev_mag = mag;
        if mag < 1e-17 * sum.norm() {
            break;
        }
    }
    let pref = (Complex64::new(std::f64::consts::FRAC_2_PI, 0.0) / z).sqrt();
    let phase = (Complex64::new(0.0, 1.0) * (z - std::f64::consts::FRAC_PI_4)).exp();
    pref * phase * sum
}

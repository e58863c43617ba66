// Copyright 2026 Entsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Small dense complex linear algebra helpers shared by the solver modules.
//!
//! Eigen and linear-solve calls are delegated to LAPACK via `ndarray-linalg`;
//! everything here just adapts shapes and error types.

use ndarray::{Array1, Array2, ArrayView2};
use ndarray_linalg::{Eig, EigValsh, Solve, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Conjugate transpose.
pub fn adjoint(a: &ArrayView2<Complex64>) -> Array2<Complex64> {
    a.t().mapv(|z| z.conj())
}

/// Frobenius norm.
pub fn fro_norm(a: &ArrayView2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry magnitude.
pub fn max_abs(a: &ArrayView2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a general complex matrix.
pub fn eigvals(a: &ArrayView2<Complex64>) -> Result<Vec<Complex64>> {
    let (vals, _) = a
        .to_owned()
        .eig()
        .map_err(|e| Error::numerical(format!("eigenvalue solve failed: {e}")))?;
    Ok(vals.to_vec())
}

/// Eigenvalues of a Hermitian matrix, ascending. Only the lower triangle is
/// referenced, so slight anti-Hermitian noise in the input is ignored.
pub fn eigvalsh(a: &ArrayView2<Complex64>) -> Result<Vec<f64>> {
    let vals = a
        .to_owned()
        .eigvalsh(UPLO::Lower)
        .map_err(|e| Error::numerical(format!("hermitian eigenvalue solve failed: {e}")))?;
    Ok(vals.to_vec())
}

/// Solve `a x = b` for square `a` by LU factorisation.
pub fn solve(a: &ArrayView2<Complex64>, b: &Array1<Complex64>) -> Result<Array1<Complex64>> {
    a.to_owned()
        .solve_into(b.clone())
        .map_err(|e| Error::numerical(format!("linear solve failed: {e}")))
}

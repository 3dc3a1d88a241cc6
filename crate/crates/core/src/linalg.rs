// Copyright 2026 The ifm-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn from_rows(rows: &[&[Complex64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| rows[i][j])
}

pub fn diag(entries: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(entries))
}

/// Kronecker product of a list of operators, left factor most significant.
pub fn kron_all(ops: &[CMatrix]) -> CMatrix {
    ops.iter().fold(identity(1), |acc, op| acc.kronecker(op))
}

/// Largest entry-wise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_square() && max_abs_diff(&(u.adjoint() * u), &identity(u.nrows())) <= tol
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Eigen-decomposition of a Hermitian matrix; the input is symmetrized first.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Eigenvalues of a Hermitian matrix, unsorted.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()).scale(0.5);
    sym.symmetric_eigenvalues().iter().copied().collect()
}

/// Eigenvalues below this are rounding noise of a rank-deficient matrix.
const EIGEN_FLOOR: f64 = 1e-14;

/// `√v` with noise-level and negative eigenvalues mapped to zero.
pub fn floored_sqrt(v: f64) -> f64 {
    if v < EIGEN_FLOOR {
        0.0
    } else {
        v.sqrt()
    }
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues
/// under `EIGEN_FLOOR` are set to zero, since their square roots would turn
/// rounding noise into errors of order 1e-8.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let roots: Vec<Complex64> = values.iter().map(|&v| c(floored_sqrt(v), 0.0)).collect();
    &vectors * diag(&roots) * vectors.adjoint()
}

/// Removes the global phase of `u` relative to `reference`, using the
/// overlap `Tr(reference^† u)`.
pub fn align_global_phase(u: &CMatrix, reference: &CMatrix) -> CMatrix {
    let overlap = (reference.adjoint() * u).trace();
    if overlap.norm() < 1e-300 {
        return u.clone();
    }
    u * (overlap.conj() / overlap.norm())
}

/// Distance between two operators modulo a global phase.
pub fn phase_insensitive_diff(u: &CMatrix, reference: &CMatrix) -> f64 {
    max_abs_diff(&align_global_phase(u, reference), reference)
}

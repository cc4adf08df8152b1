//! Thin dense linear-algebra layer over LAPACK via `ndarray-linalg`.
//!
//! Everything downstream works with complex `f64` matrices. The helpers here
//! exist so conventions (eigenvector layout, unitarity checks, matrix powers)
//! are fixed in exactly one place.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, EigVals, Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

/// Eigendecomposition of a Hermitian matrix: ascending real eigenvalues and
/// the matching orthonormal eigenvectors as columns.
///
/// `ndarray-linalg` hands the row-major buffer straight to `zheev`, which in
/// Fortran layout sees the transposed (= conjugated, for Hermitian input)
/// matrix; the vectors it returns are therefore conjugated. Undo that here.
/// A regression test pins `H v_k = w_k v_k` column by column.
pub fn hermitian_eigen(h: &CMat) -> Result<(Array1<f64>, CMat)> {
    let (w, v) = h.eigh(UPLO::Lower)?;
    Ok((w, v.mapv(|z| z.conj())))
}

/// Eigenvalues and (column) eigenvectors of a general complex matrix.
///
/// For unitary input the eigenvectors span well-conditioned invariant
/// subspaces, but within degenerate clusters they are not orthonormal;
/// invert through an LU solve, never through the conjugate transpose.
pub fn general_eigen(m: &CMat) -> Result<(CVec, CMat)> {
    Ok(m.eig()?)
}

/// Eigenvalues only of a general complex matrix.
pub fn general_eigenvalues(m: &CMat) -> Result<CVec> {
    Ok(m.eigvals()?)
}

/// Conjugate transpose.
pub fn dagger(m: &CMat) -> CMat {
    m.mapv(|z| z.conj()).reversed_axes()
}

/// Max elementwise absolute value.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max elementwise absolute difference.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Identity matrix of dimension `d`.
pub fn identity(d: usize) -> CMat {
    CMat::eye(d)
}

/// max |U†U - 1|.
pub fn unitarity_deviation(u: &CMat) -> f64 {
    let g = dagger(u).dot(u);
    let d = g.nrows();
    let mut dev = 0.0f64;
    for i in 0..d {
        for k in 0..d {
            let target = if i == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            dev = dev.max((g[[i, k]] - target).norm());
        }
    }
    dev
}

pub fn check_unitary(u: &CMat, tolerance: f64) -> Result<()> {
    let deviation = unitarity_deviation(u);
    if deviation < tolerance {
        Ok(())
    } else {
        Err(Error::NotUnitary { deviation, tolerance })
    }
}

/// U^n by binary exponentiation. O(log n) matrix products.
pub fn matrix_power(u: &CMat, n: u64) -> CMat {
    let d = u.nrows();
    let mut result = identity(d);
    let mut base = u.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = result.dot(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.dot(&base);
        }
    }
    result
}

/// Scale column `k` of `m` by `factors[k]` in place, i.e. `m <- m · diag(factors)`.
pub fn scale_columns(m: &mut CMat, factors: &CVec) {
    for (mut col, f) in m.columns_mut().into_iter().zip(factors.iter()) {
        col.mapv_inplace(|z| z * *f);
    }
}

/// max |M - e^{i phase} 1| for a square matrix.
pub fn phase_identity_residual(m: &CMat, phase: f64) -> f64 {
    let d = m.nrows();
    let eye_phase = C64::from_polar(1.0, phase);
    let mut res = 0.0f64;
    for i in 0..d {
        for k in 0..d {
            let target = if i == k { eye_phase } else { C64::new(0.0, 0.0) };
            res = res.max((m[[i, k]] - target).norm());
        }
    }
    res
}

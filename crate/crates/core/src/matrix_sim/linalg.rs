//! Small dense helpers on top of `faer`, all sequential so that per-sample
//! work stays deterministic inside the ensemble thread pool.

use faer::linalg::matmul::matmul;
use faer::linalg::solvers::Solve;
use faer::{Accum, Mat, MatRef, Par, Side};
use num_complex::Complex64 as C64;

use crate::error::{LabError, Result};

pub type CMat = Mat<C64>;

pub fn identity(n: usize) -> CMat {
    Mat::identity(n, n)
}

pub fn mm(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> CMat {
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a, b, C64::new(1.0, 0.0), Par::Seq);
    out
}

/// `a · b*`.
pub fn mm_adj(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> CMat {
    let mut out = Mat::zeros(a.nrows(), b.nrows());
    matmul(out.as_mut(), Accum::Replace, a, b.adjoint(), C64::new(1.0, 0.0), Par::Seq);
    out
}

pub fn adjoint(a: MatRef<'_, C64>) -> CMat {
    a.adjoint().to_owned()
}

/// Normalized trace `tr_N`.
pub fn ntrace(a: MatRef<'_, C64>) -> C64 {
    let n = a.nrows();
    let mut s = C64::new(0.0, 0.0);
    for k in 0..n {
        s += a[(k, k)];
    }
    s / n as f64
}

/// `tr_N(a·b)` without forming the product.
pub fn ntrace_product(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> C64 {
    let n = a.nrows();
    let mut s = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s / a.nrows() as f64
}

pub fn frobenius(a: MatRef<'_, C64>) -> f64 {
    a.norm_l2()
}

/// Operator 1-norm (max column sum).
pub fn norm1(a: MatRef<'_, C64>) -> f64 {
    (0..a.ncols()).map(|j| a.col(j).iter().map(|z| (z.re * z.re + z.im * z.im).sqrt()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn hermitian_part(a: MatRef<'_, C64>) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

pub fn anti_hermitian_part(a: MatRef<'_, C64>) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] - a[(j, i)].conj()) * 0.5)
}

pub fn scale(a: MatRef<'_, C64>, c: C64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * c)
}

/// Eigenvalues of the Hermitian part, ascending.
pub fn hermitian_eigenvalues(a: MatRef<'_, C64>) -> Result<Vec<f64>> {
    let h = hermitian_part(a);
    h.self_adjoint_eigenvalues(Side::Lower).map_err(|_| LabError::Singular)
}

/// Solves `a · x = b`.
pub fn solve(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> Result<CMat> {
    let x = a.partial_piv_lu().solve(b);
    if (0..x.ncols()).all(|j| x.col(j).iter().all(|z| z.re.is_finite() && z.im.is_finite())) {
        Ok(x)
    } else {
        Err(LabError::Singular)
    }
}

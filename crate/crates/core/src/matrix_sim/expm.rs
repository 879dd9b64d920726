//! Matrix exponential by scaling and squaring with diagonal Padé approximants
//! of degree 3, 5, 7, 9 or 13.
//!
//! Degree and scaling follow the backward error bounds of Higham (2005) with
//! the `‖A^p‖^{1/p}` refinement of Al-Mohy and Higham (2009). `‖A³‖` and `‖A⁵‖`
//! are bounded by products of computed powers instead of being estimated.
//! For anti-Hermitian input the approximant `(V − U)⁻¹(V + U)` is unitary up
//! to rounding.

use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;

use super::linalg::{identity, mm, norm1, solve, CMat};
use crate::error::Result;

const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

fn pade_coefficients(m: usize) -> Vec<f64> {
    // b_k = (2m−k)! m! / ((2m)! k! (m−k)!), built by ratios.
    let mut b = vec![1.0; m + 1];
    for k in 1..=m {
        b[k] = b[k - 1] * (m + 1 - k) as f64 / (k as f64 * (2 * m + 1 - k) as f64);
    }
    b
}

fn axpy_into(out: &mut CMat, c: f64, a: MatRef<'_, C64>) {
    for j in 0..out.ncols() {
        for (o, x) in out.col_mut(j).iter_mut().zip(a.col(j).iter()) {
            *o += x * c;
        }
    }
}

fn add_identity(out: &mut CMat, c: f64) {
    for i in 0..out.nrows() {
        out[(i, i)] += c;
    }
}

/// Degree and number of squarings chosen for `a`.
pub fn expm_params(a: MatRef<'_, C64>) -> (usize, u32) {
    let n1 = norm1(a);
    let a2 = mm(a, a);
    let a4 = mm(a2.as_ref(), a2.as_ref());
    choose(n1, norm1(a2.as_ref()), norm1(a4.as_ref()))
}

fn choose(n1: f64, n2: f64, n4: f64) -> (usize, u32) {
    let d2 = n2.sqrt();
    let d3 = (n2 * n1).cbrt();
    let d4 = n4.powf(0.25);
    let d5 = (n4 * n1).powf(0.2);
    if d2.max(d3) <= THETA[0].1 {
        return (3, 0);
    }
    let a3 = d3.max(d4);
    for &(m, theta) in &THETA[1..4] {
        if a3 <= theta {
            return (m, 0);
        }
    }
    let a4 = d4.max(d5);
    let s = if a4 <= THETA[4].1 { 0 } else { (a4 / THETA[4].1).log2().ceil() as u32 };
    (13, s)
}

/// `exp(a)`.
pub fn expm(a: MatRef<'_, C64>) -> Result<CMat> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let a2 = mm(a, a);
    let a4 = mm(a2.as_ref(), a2.as_ref());
    let (m, s) = choose(norm1(a), norm1(a2.as_ref()), norm1(a4.as_ref()));
    let (u, v) = if m < 13 {
        let b = pade_coefficients(m);
        let mut powers = vec![identity(n), a2, a4];
        while 2 * (powers.len() - 1) < m - 1 {
            let next = mm(powers[powers.len() - 1].as_ref(), powers[1].as_ref());
            powers.push(next);
        }
        let mut odd = Mat::zeros(n, n);
        let mut even = Mat::zeros(n, n);
        for (k, p) in powers.iter().enumerate() {
            if 2 * k + 1 <= m {
                axpy_into(&mut odd, b[2 * k + 1], p.as_ref());
            }
            if 2 * k <= m {
                axpy_into(&mut even, b[2 * k], p.as_ref());
            }
        }
        (mm(a, odd.as_ref()), even)
    } else {
        let f = 0.5f64.powi(s as i32);
        let a1 = Mat::from_fn(n, n, |i, j| a[(i, j)] * f);
        let a2 = Mat::from_fn(n, n, |i, j| a2[(i, j)] * (f * f));
        let a4 = Mat::from_fn(n, n, |i, j| a4[(i, j)] * (f * f * f * f));
        let a6 = mm(a4.as_ref(), a2.as_ref());
        let b = pade_coefficients(13);
        let mut inner_u = Mat::zeros(n, n);
        axpy_into(&mut inner_u, b[13], a6.as_ref());
        axpy_into(&mut inner_u, b[11], a4.as_ref());
        axpy_into(&mut inner_u, b[9], a2.as_ref());
        let mut tu = mm(a6.as_ref(), inner_u.as_ref());
        axpy_into(&mut tu, b[7], a6.as_ref());
        axpy_into(&mut tu, b[5], a4.as_ref());
        axpy_into(&mut tu, b[3], a2.as_ref());
        add_identity(&mut tu, b[1]);
        let u = mm(a1.as_ref(), tu.as_ref());
        let mut inner_v = Mat::zeros(n, n);
        axpy_into(&mut inner_v, b[12], a6.as_ref());
        axpy_into(&mut inner_v, b[10], a4.as_ref());
        axpy_into(&mut inner_v, b[8], a2.as_ref());
        let mut v = mm(a6.as_ref(), inner_v.as_ref());
        axpy_into(&mut v, b[6], a6.as_ref());
        axpy_into(&mut v, b[4], a4.as_ref());
        axpy_into(&mut v, b[2], a2.as_ref());
        add_identity(&mut v, b[0]);
        (u, v)
    };
    let p = Mat::from_fn(n, n, |i, j| v[(i, j)] + u[(i, j)]);
    let q = Mat::from_fn(n, n, |i, j| v[(i, j)] - u[(i, j)]);
    let mut r = solve(q.as_ref(), p.as_ref())?;
    for _ in 0..s {
        r = mm(r.as_ref(), r.as_ref());
    }
    Ok(r)
}

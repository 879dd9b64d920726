//! Evaluation of words and trace polynomials on matrices.

use std::collections::HashMap;

use faer::Mat;
use num_complex::Complex64 as C64;

use super::linalg::{adjoint, identity, mm, mm_adj, ntrace, ntrace_product, solve, CMat};
use super::xmats::XMatrices;
use crate::cond_expect::TracePoly;
use crate::error::{LabError, Result};
use crate::nc_algebra::{Letter, Time, Word};

/// Resolves letters to matrices for one realization.
pub trait MatrixSource {
    fn x_matrices(&self) -> &XMatrices;

    /// Number of unitary components `n`.
    fn components(&self) -> u32;

    /// `U_i(t)`; `None` stands for the identity.
    fn unitary(&self, i: u32, t: Time) -> Result<Option<&CMat>>;

    /// Matrix standing in for a `ũ`/`v` letter (without the star). Only
    /// grafted sources provide these.
    fn free_unitary(&self, l: &Letter) -> Result<Option<&CMat>> {
        Err(LabError::UnexpectedLetter { op: "matrix evaluation", letter: *l })
    }

    fn size(&self) -> usize {
        self.x_matrices().size()
    }
}

/// `U_i(t) X_{ij} U_i(t)*`; the static family `i = n+1` is returned as is.
pub fn liberation_snapshot(src: &dyn MatrixSource, t: Time, i: u32, j: u32) -> Result<CMat> {
    let n = src.components();
    if i == 0 || i > n + 1 {
        return Err(LabError::IndexOutOfRange(format!("liberation index {i} not in 1..={}", n + 1)));
    }
    let x = src.x_matrices().get(i, j)?;
    if i == n + 1 {
        return Ok(x.clone());
    }
    Ok(match src.unitary(i, t)? {
        None => x.clone(),
        Some(u) => mm_adj(mm(u.as_ref(), x.as_ref()).as_ref(), u.as_ref()),
    })
}

enum Factor<'a> {
    Id,
    Plain(&'a CMat),
    Adj(&'a CMat),
    Owned(CMat),
    Diag(&'a [C64]),
}

fn factor<'a>(src: &'a dyn MatrixSource, l: &Letter) -> Result<Factor<'a>> {
    Ok(match *l {
        Letter::X { g, j } => match src.x_matrices().diagonal(g, j) {
            Some(d) => Factor::Diag(d),
            None => Factor::Plain(src.x_matrices().get(g, j)?),
        },
        Letter::XL { i, j, t } => Factor::Owned(liberation_snapshot(src, t, i, j)?),
        Letter::U { i, t, star } => match src.unitary(i, t)? {
            None => Factor::Id,
            Some(m) if star => Factor::Adj(m),
            Some(m) => Factor::Plain(m),
        },
        Letter::UT { star, .. } | Letter::V { star, .. } => match src.free_unitary(&if star { l.adjoint() } else { *l })? {
            None => Factor::Id,
            Some(m) if star => Factor::Adj(m),
            Some(m) => Factor::Plain(m),
        },
    })
}

/// Partial product of a word; diagonal while only diagonal factors were met.
#[derive(Clone, Debug)]
enum Acc {
    Diag(Vec<C64>),
    Full(CMat),
}

impl Acc {
    fn into_matrix(self) -> CMat {
        match self {
            Acc::Full(m) => m,
            Acc::Diag(d) => Mat::from_fn(d.len(), d.len(), |r, c| if r == c { d[r] } else { C64::new(0.0, 0.0) }),
        }
    }
}

/// `diag(d) · m` or `diag(d) · m*`.
fn scale_rows(d: &[C64], m: &CMat, adj: bool) -> CMat {
    let n = d.len();
    if adj {
        Mat::from_fn(n, n, |r, c| d[r] * m[(c, r)].conj())
    } else {
        Mat::from_fn(n, n, |r, c| d[r] * m[(r, c)])
    }
}

fn times(acc: Option<Acc>, f: Factor<'_>) -> Option<Acc> {
    Some(match (acc, f) {
        (acc, Factor::Id) => return acc,
        (None, Factor::Plain(m)) => Acc::Full(m.clone()),
        (None, Factor::Adj(m)) => Acc::Full(adjoint(m.as_ref())),
        (None, Factor::Owned(m)) => Acc::Full(m),
        (None, Factor::Diag(d)) => Acc::Diag(d.to_vec()),
        (Some(Acc::Diag(a)), Factor::Diag(d)) => Acc::Diag(a.iter().zip(d).map(|(p, q)| p * q).collect()),
        (Some(Acc::Diag(a)), Factor::Plain(m)) => Acc::Full(scale_rows(&a, m, false)),
        (Some(Acc::Diag(a)), Factor::Owned(m)) => Acc::Full(scale_rows(&a, &m, false)),
        (Some(Acc::Diag(a)), Factor::Adj(m)) => Acc::Full(scale_rows(&a, m, true)),
        (Some(Acc::Full(a)), Factor::Diag(d)) => Acc::Full(Mat::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)] * d[c])),
        (Some(Acc::Full(a)), Factor::Plain(m)) => Acc::Full(mm(a.as_ref(), m.as_ref())),
        (Some(Acc::Full(a)), Factor::Adj(m)) => Acc::Full(mm_adj(a.as_ref(), m.as_ref())),
        (Some(Acc::Full(a)), Factor::Owned(m)) => Acc::Full(mm(a.as_ref(), m.as_ref())),
    })
}

fn diag_trace(d: &[C64], m: &CMat, adj: bool) -> C64 {
    let s: C64 = d.iter().enumerate().map(|(k, x)| x * if adj { m[(k, k)].conj() } else { m[(k, k)] }).sum();
    s / d.len() as f64
}

/// `tr_N(acc · f)` without forming the product.
fn trace_with(acc: Option<&Acc>, f: &Factor<'_>, n: usize) -> C64 {
    let mean = |d: &[C64]| d.iter().sum::<C64>() / n as f64;
    match (acc, f) {
        (None, Factor::Id) => C64::new(1.0, 0.0),
        (Some(Acc::Diag(a)), Factor::Id) => mean(a),
        (Some(Acc::Full(a)), Factor::Id) => ntrace(a.as_ref()),
        (None, Factor::Plain(m)) => ntrace(m.as_ref()),
        (None, Factor::Owned(m)) => ntrace(m.as_ref()),
        (None, Factor::Adj(m)) => ntrace(m.as_ref()).conj(),
        (None, Factor::Diag(d)) => mean(d),
        (Some(Acc::Diag(a)), Factor::Diag(d)) => a.iter().zip(d.iter()).map(|(p, q)| p * q).sum::<C64>() / n as f64,
        (Some(Acc::Diag(a)), Factor::Plain(m)) => diag_trace(a, m, false),
        (Some(Acc::Diag(a)), Factor::Owned(m)) => diag_trace(a, m, false),
        (Some(Acc::Diag(a)), Factor::Adj(m)) => diag_trace(a, m, true),
        (Some(Acc::Full(a)), Factor::Diag(d)) => diag_trace(d, a, false),
        (Some(Acc::Full(a)), Factor::Plain(m)) => tr_prod(a, m, false),
        (Some(Acc::Full(a)), Factor::Owned(m)) => tr_prod(a, m, false),
        (Some(Acc::Full(a)), Factor::Adj(m)) => tr_prod(a, m, true),
    }
}

/// `π_N(w)`.
pub fn eval_word(src: &dyn MatrixSource, w: &Word) -> Result<CMat> {
    let mut acc = None;
    for l in w.letters() {
        acc = times(acc, factor(src, l)?);
    }
    Ok(acc.map_or_else(|| identity(src.size()), Acc::into_matrix))
}

/// `tr_N(π_N(w))`; the last factor is folded into the trace.
pub fn eval_word_trace(src: &dyn MatrixSource, w: &Word) -> Result<C64> {
    let letters = w.letters();
    let Some((last, init)) = letters.split_last() else {
        return Ok(C64::new(1.0, 0.0));
    };
    let mut acc = None;
    for l in init {
        acc = times(acc, factor(src, l)?);
    }
    Ok(trace_with(acc.as_ref(), &factor(src, last)?, src.size()))
}

fn tr_prod(a: &CMat, b: &CMat, adj: bool) -> C64 {
    if adj {
        // tr(a b*) = Σ a_ik conj(b_ik)
        let n = a.nrows();
        let mut s = C64::new(0.0, 0.0);
        for k in 0..n {
            for (x, y) in a.col(k).iter().zip(b.col(k).iter()) {
                s += x * y.conj();
            }
        }
        s / n as f64
    } else {
        ntrace_product(a.as_ref(), b.as_ref())
    }
}

/// Memoized evaluation against one source: partial products are shared
/// between words with a common prefix, traces between repeated words.
pub struct EvalCache<'a> {
    src: &'a dyn MatrixSource,
    prefixes: HashMap<Vec<Letter>, Option<Acc>>,
    traces: HashMap<Word, C64>,
}

impl<'a> EvalCache<'a> {
    pub fn new(src: &'a dyn MatrixSource) -> Self {
        EvalCache { src, prefixes: HashMap::new(), traces: HashMap::new() }
    }

    fn prefix(&mut self, letters: &[Letter]) -> Result<Option<&Acc>> {
        if letters.is_empty() {
            return Ok(None);
        }
        let known = (1..=letters.len()).rev().find(|&k| self.prefixes.contains_key(&letters[..k])).unwrap_or(0);
        for k in known + 1..=letters.len() {
            let prev = if k == 1 { None } else { self.prefixes[&letters[..k - 1]].clone() };
            let next = times(prev, factor(self.src, &letters[k - 1])?);
            self.prefixes.insert(letters[..k].to_vec(), next);
        }
        Ok(self.prefixes[letters].as_ref())
    }

    /// `π_N(w)`.
    pub fn matrix(&mut self, w: &Word) -> Result<CMat> {
        let n = self.src.size();
        Ok(self.prefix(w.letters())?.cloned().map_or_else(|| identity(n), Acc::into_matrix))
    }

    /// `tr_N(π_N(w))`.
    pub fn trace(&mut self, w: &Word) -> Result<C64> {
        if let Some(v) = self.traces.get(w) {
            return Ok(*v);
        }
        let letters = w.letters();
        let v = match letters.split_last() {
            None => C64::new(1.0, 0.0),
            Some((last, init)) => {
                let src = self.src;
                let n = src.size();
                let f = factor(src, last)?;
                trace_with(self.prefix(init)?, &f, n)
            }
        };
        self.traces.insert(w.clone(), v);
        Ok(v)
    }

    fn coefficient(&mut self, symbols: &[Word], c: C64) -> Result<C64> {
        let mut acc = c;
        for s in symbols {
            acc *= self.trace(s)?;
        }
        Ok(acc)
    }

    /// `Σ c · Π tr_N(π_N(symbol)) · π_N(carrier)`.
    pub fn trace_poly(&mut self, tp: &TracePoly) -> Result<CMat> {
        let n = self.src.size();
        let mut out: CMat = Mat::zeros(n, n);
        for (symbols, carrier, c) in tp.terms() {
            let coef = self.coefficient(symbols, *c)?;
            match self.prefix(carrier.letters())? {
                None => {
                    for k in 0..n {
                        out[(k, k)] += coef;
                    }
                }
                Some(Acc::Diag(d)) => {
                    for k in 0..n {
                        out[(k, k)] += coef * d[k];
                    }
                }
                Some(Acc::Full(m)) => {
                    for k in 0..n {
                        for (o, x) in out.col_mut(k).iter_mut().zip(m.col(k).iter()) {
                            *o += coef * x;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `tr_N` of [`EvalCache::trace_poly`], term by term.
    pub fn trace_poly_scalar(&mut self, tp: &TracePoly) -> Result<C64> {
        let mut out = C64::new(0.0, 0.0);
        for (symbols, carrier, c) in tp.terms() {
            out += self.coefficient(symbols, *c)? * self.trace(carrier)?;
        }
        Ok(out)
    }
}

/// `Σ c · Π tr_N(π_N(symbol)) · π_N(carrier)`.
pub fn eval_trace_poly(src: &dyn MatrixSource, tp: &TracePoly) -> Result<CMat> {
    EvalCache::new(src).trace_poly(tp)
}

/// `tr_N` of [`eval_trace_poly`], computed term by term.
pub fn eval_trace_poly_scalar(src: &dyn MatrixSource, tp: &TracePoly) -> Result<C64> {
    EvalCache::new(src).trace_poly_scalar(tp)
}

/// `tr_N((zI − A)⁻¹)` by an LU solve.
pub fn resolvent_trace(a: &CMat, z: C64) -> Result<C64> {
    let n = a.nrows();
    let m = Mat::from_fn(n, n, |i, j| if i == j { z - a[(i, j)] } else { -a[(i, j)] });
    let inv = solve(m.as_ref(), identity(n).as_ref())?;
    Ok(ntrace(inv.as_ref()))
}

/// A fixed set of unitaries at one time plus the `X` matrices; used for
/// single-time evaluations and tests.
pub struct StaticSource<'a> {
    pub x: &'a XMatrices,
    pub t: Time,
    pub u: Vec<CMat>,
}

impl MatrixSource for StaticSource<'_> {
    fn x_matrices(&self) -> &XMatrices {
        self.x
    }

    fn components(&self) -> u32 {
        self.u.len() as u32
    }

    fn unitary(&self, i: u32, t: Time) -> Result<Option<&CMat>> {
        if t.is_zero() {
            return Ok(None);
        }
        if t != self.t {
            return Err(LabError::MissingSnapshot(t));
        }
        self.u.get(i as usize - 1).map(Some).ok_or_else(|| LabError::IndexOutOfRange(format!("component {i}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_sim::config::SimConfig;
    use crate::matrix_sim::expm::expm;
    use crate::nc_algebra::NCPoly;

    fn setup() -> (XMatrices, CMat) {
        let cfg = SimConfig::new(5, 1, 1.0, 0.1, 1, 0);
        let x = XMatrices::build(&cfg).unwrap();
        let k = Mat::from_fn(5, 5, |i, j| C64::new(0.0, ((i * 3 + j * 5) % 7) as f64 * 0.1 + ((i + j) % 2) as f64 * 0.05));
        let k = Mat::from_fn(5, 5, |i, j| (k[(i, j)] - k[(j, i)].conj()) * 0.5);
        (x, expm(k.as_ref()).unwrap())
    }

    #[test]
    fn words_and_traces() {
        let (x, u) = setup();
        let t = Time::from_secs(0.5);
        let src = StaticSource { x: &x, t, u: vec![u.clone()] };
        assert_eq!(eval_word_trace(&src, &Word::empty()).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(eval_word_trace(&src, &Word::letter(Letter::u(1, 0.0))).unwrap(), C64::new(1.0, 0.0));
        let w = Word::new([Letter::x(1), Letter::u(1, 0.5), Letter::x(1), Letter::x_family(1, 1), Letter::u_star(1, 0.5)]);
        let direct = ntrace(eval_word(&src, &w).unwrap().as_ref());
        let tr = eval_word_trace(&src, &w).unwrap();
        assert!((direct - tr).norm() < 1e-14);
        let tr_adj = eval_word_trace(&src, &w.adjoint()).unwrap();
        assert!((tr_adj - tr.conj()).norm() < 1e-14);
        assert!(eval_word_trace(&src, &Word::letter(Letter::ut(1, 0.2))).is_err());
        assert!(eval_word_trace(&src, &Word::letter(Letter::u(1, 0.7))).is_err());
    }

    #[test]
    fn liberation_letters() {
        let (x, u) = setup();
        let t = Time::from_secs(0.5);
        let src = StaticSource { x: &x, t, u: vec![u] };
        let xl = liberation_snapshot(&src, t, 1, 1).unwrap();
        let mut a = crate::matrix_sim::linalg::hermitian_eigenvalues(xl.as_ref()).unwrap();
        let mut b = crate::matrix_sim::linalg::hermitian_eigenvalues(x.get(1, 1).unwrap().as_ref()).unwrap();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert!(a.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-12));
        assert_eq!(&liberation_snapshot(&src, Time::ZERO, 1, 1).unwrap(), x.get(1, 1).unwrap());
        assert_eq!(&liberation_snapshot(&src, t, 2, 1).unwrap(), x.get(2, 1).unwrap());
        assert!(liberation_snapshot(&src, t, 3, 1).is_err());
    }

    #[test]
    fn trace_poly_modes() {
        let (x, u) = setup();
        let t = Time::from_secs(0.5);
        let src = StaticSource { x: &x, t, u: vec![u] };
        let w = Word::new([Letter::x(1), Letter::u(1, 0.5)]);
        let tp = TracePoly::from(NCPoly::from(w.clone()));
        assert_eq!(eval_trace_poly(&src, &tp).unwrap(), eval_word(&src, &w).unwrap());
        let sym = TracePoly::trace_symbol(w.clone());
        let m = eval_trace_poly(&src, &sym).unwrap();
        let tr = eval_word_trace(&src, &w).unwrap();
        assert!((m[(2, 2)] - tr).norm() < 1e-15 && m[(0, 1)].norm() == 0.0);
        let both = sym.multiply(&tp).scale(C64::new(0.0, 2.0));
        let s = eval_trace_poly_scalar(&src, &both).unwrap();
        assert!((s - C64::new(0.0, 2.0) * tr * tr).norm() < 1e-14);
    }

    #[test]
    fn resolvent() {
        let z = Mat::<C64>::zeros(3, 3);
        assert!((resolvent_trace(&z, C64::new(0.0, 1.0)).unwrap() - C64::new(0.0, -1.0)).norm() < 1e-15);
        let d = Mat::from_fn(2, 2, |i, j| if i != j { C64::new(0.0, 0.0) } else if i == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) });
        assert!((resolvent_trace(&d, C64::new(2.0, 0.0)).unwrap() - C64::new(2.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(resolvent_trace(&d, C64::new(1.0, 0.0)).is_err());
    }
}

//! Noncommutative polynomials and their tensor squares.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use super::word::{Letter, Word};

/// Relative comparison used wherever `e^{t/2}`-type floats enter a symbolic
/// identity.
pub const SYMBOLIC_REL_TOL: f64 = 1e-12;

pub(crate) fn add_coeff<K: Ord>(map: &mut BTreeMap<K, C64>, key: K, c: C64) {
    if c == C64::new(0.0, 0.0) {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            let v = *e.get() + c;
            if v == C64::new(0.0, 0.0) {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
    }
}

/// Coefficient maps agree when every difference is below `rel_tol` times the
/// largest coefficient magnitude on either side (or below `rel_tol` itself).
pub(crate) fn maps_approx_eq<K: Ord>(a: &BTreeMap<K, C64>, b: &BTreeMap<K, C64>, rel_tol: f64) -> bool {
    let scale = a.values().chain(b.values()).map(|c| c.norm()).fold(1.0_f64, f64::max);
    let tol = rel_tol * scale;
    let zero = C64::new(0.0, 0.0);
    a.iter().all(|(k, &c)| (c - *b.get(k).unwrap_or(&zero)).norm() <= tol)
        && b.iter().all(|(k, &c)| (c - *a.get(k).unwrap_or(&zero)).norm() <= tol)
}

/// Complex-weighted sum of canonical words.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NCPoly {
    terms: BTreeMap<Word, C64>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly::default()
    }

    pub fn one() -> Self {
        NCPoly::from_word(Word::empty(), C64::new(1.0, 0.0))
    }

    pub fn scalar(c: C64) -> Self {
        NCPoly::from_word(Word::empty(), c)
    }

    pub fn from_word(w: Word, c: C64) -> Self {
        let mut p = NCPoly::zero();
        p.add_term(w, c);
        p
    }

    pub fn letter(l: Letter) -> Self {
        NCPoly::from_word(Word::letter(l), C64::new(1.0, 0.0))
    }

    pub fn word(letters: impl IntoIterator<Item = Letter>) -> Self {
        NCPoly::from_word(Word::new(letters), C64::new(1.0, 0.0))
    }

    pub fn add_term(&mut self, w: Word, c: C64) {
        add_coeff(&mut self.terms, w, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> C64 {
        self.terms.get(w).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: C64) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, &a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    pub fn adjoint(&self) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, a) in &self.terms {
            out.add_term(w.adjoint(), a.conj());
        }
        out
    }

    pub fn is_self_adjoint(&self, rel_tol: f64) -> bool {
        self.approx_eq(&self.adjoint(), rel_tol)
    }

    pub fn multiply(&self, other: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w1, a) in &self.terms {
            for (w2, b) in &other.terms {
                out.add_term(w1.concat(w2), a * b);
            }
        }
        out
    }

    /// Applies a letter substitution extended as a unital homomorphism.
    pub fn substitute(&self, f: impl Fn(&Letter) -> NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (w, &c) in &self.terms {
            let mut acc = NCPoly::scalar(c);
            for l in w.letters() {
                acc = acc.multiply(&f(l));
            }
            out = out + acc;
        }
        out
    }

    pub fn approx_eq(&self, other: &NCPoly, rel_tol: f64) -> bool {
        maps_approx_eq(&self.terms, &other.terms, rel_tol)
    }

    /// Drops coefficients with magnitude at most `eps`.
    pub fn pruned(&self, eps: f64) -> NCPoly {
        NCPoly { terms: self.terms.iter().filter(|(_, c)| c.norm() > eps).map(|(w, c)| (w.clone(), *c)).collect() }
    }

    pub fn max_time(&self) -> Option<super::time::Time> {
        self.terms.keys().filter_map(|w| w.max_time()).max()
    }

    pub fn letters(&self) -> impl Iterator<Item = &Letter> {
        self.terms.keys().flat_map(|w| w.letters().iter())
    }
}

impl From<Word> for NCPoly {
    fn from(w: Word) -> Self {
        NCPoly::from_word(w, C64::new(1.0, 0.0))
    }
}

impl Add for NCPoly {
    type Output = NCPoly;
    fn add(mut self, rhs: NCPoly) -> NCPoly {
        for (w, c) in rhs.terms {
            self.add_term(w, c);
        }
        self
    }
}

impl Sub for NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: NCPoly) -> NCPoly {
        self + rhs.scale(C64::new(-1.0, 0.0))
    }
}

impl Neg for NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        self.multiply(rhs)
    }
}

impl Mul for NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: NCPoly) -> NCPoly {
        self.multiply(&rhs)
    }
}

pub(crate) fn fmt_complex(c: C64) -> String {
    format!("{}{:+}i", c.re, c.im)
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if w.is_empty() {
                write!(f, "{}", fmt_complex(*c))?;
            } else {
                write!(f, "{}*{w}", fmt_complex(*c))?;
            }
        }
        Ok(())
    }
}

/// Element of `ℂ⟨·⟩ ⊗ ℂ⟨·⟩` as a map from word pairs to coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TensorNCPoly {
    terms: BTreeMap<(Word, Word), C64>,
}

impl TensorNCPoly {
    pub fn zero() -> Self {
        TensorNCPoly::default()
    }

    pub fn one() -> Self {
        TensorNCPoly::simple(Word::empty(), Word::empty(), C64::new(1.0, 0.0))
    }

    pub fn simple(a: Word, b: Word, c: C64) -> Self {
        let mut t = TensorNCPoly::zero();
        t.add_term(a, b, c);
        t
    }

    /// `p ⊗ q`.
    pub fn tensor(p: &NCPoly, q: &NCPoly) -> Self {
        let mut t = TensorNCPoly::zero();
        for (a, x) in p.terms() {
            for (b, y) in q.terms() {
                t.add_term(a.clone(), b.clone(), x * y);
            }
        }
        t
    }

    pub fn add_term(&mut self, a: Word, b: Word, c: C64) {
        add_coeff(&mut self.terms, (a, b), c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &C64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// `(p ⊗ 1) · self`.
    pub fn left_mul(&self, p: &NCPoly) -> TensorNCPoly {
        let mut out = TensorNCPoly::zero();
        for (w, x) in p.terms() {
            for ((a, b), y) in &self.terms {
                out.add_term(w.concat(a), b.clone(), x * y);
            }
        }
        out
    }

    /// `self · (1 ⊗ q)`.
    pub fn right_mul(&self, q: &NCPoly) -> TensorNCPoly {
        let mut out = TensorNCPoly::zero();
        for ((a, b), y) in &self.terms {
            for (w, x) in q.terms() {
                out.add_term(a.clone(), b.concat(w), x * y);
            }
        }
        out
    }

    /// Product in the tensor algebra: `(a⊗b)(c⊗d) = ac ⊗ bd`.
    pub fn multiply(&self, other: &TensorNCPoly) -> TensorNCPoly {
        let mut out = TensorNCPoly::zero();
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &other.terms {
                out.add_term(a.concat(c), b.concat(d), x * y);
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> TensorNCPoly {
        let mut out = TensorNCPoly::zero();
        for ((a, b), x) in &self.terms {
            out.add_term(a.clone(), b.clone(), x * c);
        }
        out
    }

    pub fn approx_eq(&self, other: &TensorNCPoly, rel_tol: f64) -> bool {
        maps_approx_eq(&self.terms, &other.terms, rel_tol)
    }
}

impl Add for TensorNCPoly {
    type Output = TensorNCPoly;
    fn add(mut self, rhs: TensorNCPoly) -> TensorNCPoly {
        for ((a, b), c) in rhs.terms {
            self.add_term(a, b, c);
        }
        self
    }
}

impl Sub for TensorNCPoly {
    type Output = TensorNCPoly;
    fn sub(self, rhs: TensorNCPoly) -> TensorNCPoly {
        self + rhs.scale(C64::new(-1.0, 0.0))
    }
}

impl fmt::Display for TensorNCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, ((a, b), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*({a} ⊗ {b})", fmt_complex(*c))?;
        }
        Ok(())
    }
}

/// `θ(a ⊗ b) = b a`.
pub fn theta(t: &TensorNCPoly) -> NCPoly {
    let mut out = NCPoly::zero();
    for ((a, b), c) in t.terms() {
        out.add_term(b.concat(a), *c);
    }
    out
}

/// `(a ⊗ b) ♯ ξ = a ξ b`.
pub fn sharp_apply(t: &TensorNCPoly, xi: &NCPoly) -> NCPoly {
    let mut out = NCPoly::zero();
    for ((a, b), c) in t.terms() {
        for (w, d) in xi.terms() {
            out.add_term(a.concat(w).concat(b), c * d);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjoint_is_antimultiplicative_and_conjugates() {
        let p = NCPoly::from_word(Word::new([Letter::x(1), Letter::u(1, 1.0)]), c(0.0, 1.0));
        let expected = NCPoly::from_word(Word::new([Letter::u_star(1, 1.0), Letter::x(1)]), c(0.0, -1.0));
        assert_eq!(p.adjoint(), expected);
    }

    #[test]
    fn unitarity_in_products() {
        let p = NCPoly::letter(Letter::u(1, 0.5)) * NCPoly::letter(Letter::u_star(1, 0.5));
        assert_eq!(p, NCPoly::one());
    }

    #[test]
    fn theta_swaps_slots() {
        let t = TensorNCPoly::simple(Word::letter(Letter::x(1)), Word::letter(Letter::u(1, 1.0)), c(1.0, 0.0));
        assert_eq!(theta(&t), NCPoly::word([Letter::u(1, 1.0), Letter::x(1)]));
        assert_eq!(theta(&TensorNCPoly::one()), NCPoly::one());
    }

    #[test]
    fn sharp_inserts_between_slots() {
        let t = TensorNCPoly::simple(Word::letter(Letter::x(1)), Word::letter(Letter::u(1, 1.0)), c(1.0, 0.0));
        let xi = NCPoly::letter(Letter::u(2, 0.5));
        assert_eq!(sharp_apply(&t, &xi), NCPoly::word([Letter::x(1), Letter::u(2, 0.5), Letter::u(1, 1.0)]));
        assert_eq!(sharp_apply(&TensorNCPoly::one(), &xi), xi);
        assert!(sharp_apply(&t, &NCPoly::zero()).is_zero());
    }

    #[test]
    fn cancellation_removes_entries() {
        let p = NCPoly::letter(Letter::x(1));
        assert!((p.clone() - p).is_zero());
    }
}

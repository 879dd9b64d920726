//! Trace polynomials: sums of `scalar × Tr(w₁)⋯Tr(w_k) × carrier`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::nc_algebra::{add_coeff, fmt_complex, maps_approx_eq, Letter, NCPoly, Word};

/// Sorted multiset of trace symbols, each stored in cyclic canonical form.
pub type TraceSymbols = Vec<Word>;

fn canonical_symbols(symbols: impl IntoIterator<Item = Word>) -> TraceSymbols {
    let mut v: Vec<Word> = symbols.into_iter().map(|w| w.cyclic_canonical()).filter(|w| !w.is_empty()).collect();
    v.sort();
    v
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TracePoly {
    terms: BTreeMap<(TraceSymbols, Word), C64>,
}

impl TracePoly {
    pub fn zero() -> Self {
        TracePoly::default()
    }

    pub fn one() -> Self {
        TracePoly::term(vec![], Word::empty(), C64::new(1.0, 0.0))
    }

    pub fn term(symbols: impl IntoIterator<Item = Word>, carrier: Word, c: C64) -> Self {
        let mut p = TracePoly::zero();
        p.add_term(symbols, carrier, c);
        p
    }

    /// `Tr(w)·1`.
    pub fn trace_symbol(w: Word) -> Self {
        TracePoly::term([w], Word::empty(), C64::new(1.0, 0.0))
    }

    pub fn add_term(&mut self, symbols: impl IntoIterator<Item = Word>, carrier: Word, c: C64) {
        add_coeff(&mut self.terms, (canonical_symbols(symbols), carrier), c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TraceSymbols, &Word, &C64)> {
        self.terms.iter().map(|((s, w), c)| (s, w, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: C64) -> TracePoly {
        let mut out = TracePoly::zero();
        for ((s, w), a) in &self.terms {
            add_coeff(&mut out.terms, (s.clone(), w.clone()), a * c);
        }
        out
    }

    pub fn multiply(&self, other: &TracePoly) -> TracePoly {
        let mut out = TracePoly::zero();
        for ((s1, w1), a) in &self.terms {
            for ((s2, w2), b) in &other.terms {
                let mut s: Vec<Word> = s1.iter().chain(s2.iter()).cloned().collect();
                s.sort();
                add_coeff(&mut out.terms, (s, w1.concat(w2)), a * b);
            }
        }
        out
    }

    pub fn mul_poly_right(&self, q: &NCPoly) -> TracePoly {
        self.multiply(&TracePoly::from(q))
    }

    pub fn mul_poly_left(&self, q: &NCPoly) -> TracePoly {
        TracePoly::from(q).multiply(self)
    }

    /// Conjugates scalars, adjoins carriers and replaces each `Tr(w)` by
    /// `Tr(w*) = conj Tr(w)`.
    pub fn adjoint(&self) -> TracePoly {
        let mut out = TracePoly::zero();
        for ((s, w), a) in &self.terms {
            out.add_term(s.iter().map(|x| x.adjoint()), w.adjoint(), a.conj());
        }
        out
    }

    /// Moves every carrier into a trace symbol: the scalar trace polynomial
    /// `Tr(self)`.
    pub fn trace(&self) -> TracePoly {
        let mut out = TracePoly::zero();
        for ((s, w), a) in &self.terms {
            out.add_term(s.iter().cloned().chain(std::iter::once(w.clone())), Word::empty(), *a);
        }
        out
    }

    /// Applies a letter-to-word homomorphism to symbols and carriers.
    pub fn map_letters(&self, f: impl Fn(&Letter) -> Word) -> TracePoly {
        let map_word = |w: &Word| {
            let mut out = Word::empty();
            for l in w.letters() {
                out = out.concat(&f(l));
            }
            out
        };
        let mut out = TracePoly::zero();
        for ((s, w), a) in &self.terms {
            out.add_term(s.iter().map(map_word), map_word(w), *a);
        }
        out
    }

    pub fn approx_eq(&self, other: &TracePoly, rel_tol: f64) -> bool {
        maps_approx_eq(&self.terms, &other.terms, rel_tol)
    }

    /// Terms whose coefficient magnitude exceeds `eps`.
    pub fn pruned(&self, eps: f64) -> TracePoly {
        TracePoly { terms: self.terms.iter().filter(|(_, c)| c.norm() > eps).map(|(k, c)| (k.clone(), *c)).collect() }
    }

    pub fn letters(&self) -> impl Iterator<Item = &Letter> {
        self.terms.keys().flat_map(|(s, w)| s.iter().chain(std::iter::once(w)).flat_map(|x| x.letters().iter()))
    }

    /// The carrier part when there are no trace symbols.
    pub fn to_poly(&self) -> Option<NCPoly> {
        let mut p = NCPoly::zero();
        for ((s, w), a) in &self.terms {
            if !s.is_empty() {
                return None;
            }
            p.add_term(w.clone(), *a);
        }
        Some(p)
    }
}

impl From<&NCPoly> for TracePoly {
    fn from(p: &NCPoly) -> Self {
        let mut out = TracePoly::zero();
        for (w, c) in p.terms() {
            out.add_term(vec![], w.clone(), *c);
        }
        out
    }
}

impl From<NCPoly> for TracePoly {
    fn from(p: NCPoly) -> Self {
        TracePoly::from(&p)
    }
}

impl Add for TracePoly {
    type Output = TracePoly;
    fn add(mut self, rhs: TracePoly) -> TracePoly {
        for (k, c) in rhs.terms {
            add_coeff(&mut self.terms, k, c);
        }
        self
    }
}

impl Sub for TracePoly {
    type Output = TracePoly;
    fn sub(self, rhs: TracePoly) -> TracePoly {
        self + rhs.scale(C64::new(-1.0, 0.0))
    }
}

impl Neg for TracePoly {
    type Output = TracePoly;
    fn neg(self) -> TracePoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &TracePoly {
    type Output = TracePoly;
    fn mul(self, rhs: &TracePoly) -> TracePoly {
        self.multiply(rhs)
    }
}

impl fmt::Display for TracePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, ((s, w), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", fmt_complex(*c))?;
            for x in s {
                write!(f, "*Tr[{x}]")?;
            }
            if !w.is_empty() {
                write!(f, "*{w}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbols_are_rotation_canonical() {
        let a = Word::new([Letter::x(1), Letter::u(1, 0.5)]);
        let b = Word::new([Letter::u(1, 0.5), Letter::x(1)]);
        assert_eq!(TracePoly::trace_symbol(a), TracePoly::trace_symbol(b));
        assert_eq!(TracePoly::trace_symbol(Word::empty()), TracePoly::one());
    }

    #[test]
    fn adjoint_conjugates_symbols() {
        let w = Word::new([Letter::x(1), Letter::u(1, 0.5)]);
        let p = TracePoly::term([w.clone()], Word::letter(Letter::u(2, 0.1)), C64::new(0.0, 2.0));
        let e = TracePoly::term([w.adjoint()], Word::letter(Letter::u_star(2, 0.1)), C64::new(0.0, -2.0));
        assert_eq!(p.adjoint(), e);
        assert_eq!(p.adjoint().adjoint(), p);
    }

    #[test]
    fn trace_moves_carrier_into_symbols() {
        let p = TracePoly::term([], Word::new([Letter::x(1), Letter::x(2)]), C64::new(1.0, 0.0));
        assert_eq!(p.trace(), TracePoly::trace_symbol(Word::new([Letter::x(2), Letter::x(1)])));
    }
}

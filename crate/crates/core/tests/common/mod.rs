//! Random corpora shared by the property tests and the acceptance harness.
#![allow(dead_code)]

use liblab::nc_algebra::{Letter, NCPoly, Time, Word};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub const TIMES: [f64; 4] = [0.0, 0.3, 0.7, 1.0];
pub const CUTS: [f64; 3] = [0.2, 0.5, 1.0];

/// Deterministic runner so the acceptance output is reproducible.
pub fn runner(cases: u32) -> TestRunner {
    let cfg = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(cfg, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn time() -> impl Strategy<Value = Time> {
    prop::sample::select(TIMES.to_vec()).prop_map(Time::from_secs)
}

pub fn cut() -> impl Strategy<Value = Time> {
    prop::sample::select(CUTS.to_vec()).prop_map(Time::from_secs)
}

/// Gaussian-integer coefficients keep every product and sum exact in floating point.
pub fn coef() -> impl Strategy<Value = C64> {
    (-2i32..=2, -2i32..=2).prop_filter("nonzero", |(a, b)| *a != 0 || *b != 0).prop_map(|(a, b)| C64::new(a as f64, b as f64))
}

pub fn u_letter(n: u32) -> impl Strategy<Value = Letter> {
    prop_oneof![
        (1..=2u32).prop_map(Letter::x),
        (1..=n, time(), any::<bool>()).prop_map(|(i, t, s)| if s { Letter::u_star(i, t) } else { Letter::u(i, t) }),
    ]
}

pub fn lib_letter(n: u32) -> impl Strategy<Value = Letter> {
    (1..=n, 1..=2u32, time()).prop_map(|(i, j, t)| Letter::xl(i, j, t))
}

pub fn word_of(letter: impl Strategy<Value = Letter>, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter, 0..=max_len).prop_map(Word::new)
}

pub fn poly_of(word: impl Strategy<Value = Word>, max_terms: usize) -> impl Strategy<Value = NCPoly> {
    prop::collection::vec((word, coef()), 1..=max_terms).prop_map(|ts| {
        let mut p = NCPoly::zero();
        for (w, c) in ts {
            p.add_term(w, c);
        }
        p
    })
}

pub fn u_poly(n: u32, max_len: usize) -> impl Strategy<Value = NCPoly> {
    poly_of(word_of(u_letter(n), max_len), 3)
}

pub fn lib_poly(n: u32, max_len: usize) -> impl Strategy<Value = NCPoly> {
    poly_of(word_of(lib_letter(n), max_len), 3)
}

/// Biane's closed form for the moments of free unitary Brownian motion,
/// `m_n(t) = e^{-nt/2} Σ_{k<n} (-t)^k/k! · n^{k-1} · C(n, k+1)`.
pub fn biane_moment(n: u32, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 0..n {
        if k > 0 {
            fact *= k as f64;
        }
        let binom = (0..=k).fold(1.0, |b, m| b * (nf - m as f64) / (m as f64 + 1.0));
        sum += (-t).powi(k as i32) / fact * nf.powi(k as i32 - 1) * binom;
    }
    (-nf * t / 2.0).exp() * sum
}

//! Traces of words in the free unitary Brownian families `ũ` (or `v`).
//!
//! Each `ũ_i(s)` is rewritten through its left increments: with the distinct
//! nonzero times `0 < t_1 < … < t_K` of index `i`,
//! `ũ_i(t_m) = w_{i,m} w_{i,m−1} ⋯ w_{i,1}` where the `w_{i,k}` are free
//! unitaries distributed as `ũ(t_k − t_{k−1})`. The trace of the resulting
//! word in free elements follows from centering `c = τ(c) + c̊` and the rule
//! that alternating centered products have trace zero.

use std::collections::{BTreeMap, HashMap};

use crate::error::{LabError, Result};
use crate::free_moments::ubm_moment_at;
use crate::nc_algebra::{Letter, Time, Word};

/// Power of one free increment, raw or centered (`w^n − τ(w^n)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Elem {
    g: usize,
    n: i32,
    centered: bool,
}

struct FreeWordTrace<'a> {
    steps: &'a [Time],
    memo: HashMap<Vec<Elem>, f64>,
}

impl FreeWordTrace<'_> {
    fn moment(&self, g: usize, n: i32) -> f64 {
        ubm_moment_at(n.unsigned_abs() as usize, self.steps[g])
    }

    /// Product of two neighbours from the same algebra, expanded into raw
    /// elements with scalar weights.
    fn fuse(&self, a: Elem, b: Elem) -> Vec<(f64, Elem)> {
        let mut out = vec![(1.0, Elem { g: a.g, n: a.n + b.n, centered: false })];
        if a.centered {
            out.push((-self.moment(a.g, a.n), Elem { centered: false, ..b }));
        }
        if b.centered {
            out.push((-self.moment(b.g, b.n), Elem { centered: false, ..a }));
        }
        if a.centered && b.centered {
            out.push((self.moment(a.g, a.n) * self.moment(b.g, b.n), Elem { g: a.g, n: 0, centered: false }));
        }
        out
    }

    fn tau(&mut self, seq: &[Elem]) -> f64 {
        if let Some(&v) = self.memo.get(seq) {
            return v;
        }
        let v = self.tau_uncached(seq);
        self.memo.insert(seq.to_vec(), v);
        v
    }

    fn tau_uncached(&mut self, seq: &[Elem]) -> f64 {
        // Units.
        if let Some(k) = seq.iter().position(|e| e.n == 0) {
            if seq[k].centered {
                return 0.0;
            }
            let mut rest = seq.to_vec();
            rest.remove(k);
            return self.tau(&rest);
        }
        let len = seq.len();
        if len == 0 {
            return 1.0;
        }
        if len == 1 {
            let e = seq[0];
            return if e.centered { 0.0 } else { self.moment(e.g, e.n) };
        }
        // Neighbours from the same algebra, cyclically.
        for k in 0..len {
            let k2 = (k + 1) % len;
            if seq[k].g == seq[k2].g {
                let mut rot: Vec<Elem> = (0..len).map(|m| seq[(k + m) % len]).collect();
                let a = rot.remove(0);
                let b = rot.remove(0);
                let mut total = 0.0;
                for (c, e) in self.fuse(a, b) {
                    let mut next = Vec::with_capacity(rot.len() + 1);
                    next.push(e);
                    next.extend_from_slice(&rot);
                    total += c * self.tau(&next);
                }
                return total;
            }
        }
        match seq.iter().position(|e| !e.centered) {
            None => 0.0,
            Some(k) => {
                let e = seq[k];
                let mut centered = seq.to_vec();
                centered[k].centered = true;
                let mut removed = seq.to_vec();
                removed.remove(k);
                self.tau(&centered) + self.moment(e.g, e.n) * self.tau(&removed)
            }
        }
    }
}

/// `τ` of a word made only of `ũ` letters or only of `v` letters.
pub fn ubm_word_moment(w: &Word) -> Result<f64> {
    let mut family = None;
    let mut times: BTreeMap<u32, Vec<Time>> = BTreeMap::new();
    for l in w.letters() {
        let (i, t) = match *l {
            Letter::UT { i, t, .. } | Letter::V { i, t, .. } => (i, t),
            other => return Err(LabError::UnexpectedLetter { op: "ubm_word_moment", letter: other }),
        };
        let kind = l.kind();
        if *family.get_or_insert(kind) != kind {
            return Err(LabError::UnexpectedLetter { op: "ubm_word_moment (mixed families)", letter: *l });
        }
        times.entry(i).or_default().push(t);
    }
    // Increment generators, one per (index, time), with their step lengths.
    let mut steps = Vec::new();
    let mut chains: BTreeMap<(u32, Time), Vec<usize>> = BTreeMap::new();
    for (i, ts) in times.iter_mut() {
        ts.sort();
        ts.dedup();
        let mut prev = Time::ZERO;
        let mut chain = Vec::new();
        for &t in ts.iter() {
            chain.push(steps.len());
            steps.push(t - prev);
            chains.insert((*i, t), chain.clone());
            prev = t;
        }
    }
    // Expand and freely reduce.
    let mut seq: Vec<(usize, i32)> = Vec::new();
    let mut push = |g: usize, s: i32| {
        if let Some(last) = seq.last_mut() {
            if last.0 == g {
                last.1 += s;
                if last.1 == 0 {
                    seq.pop();
                }
                return;
            }
        }
        seq.push((g, s));
    };
    for l in w.letters() {
        let (i, t, star) = match *l {
            Letter::UT { i, t, star } | Letter::V { i, t, star } => (i, t, star),
            _ => unreachable!(),
        };
        let chain = &chains[&(i, t)];
        if star {
            for &g in chain.iter() {
                push(g, -1);
            }
        } else {
            for &g in chain.iter().rev() {
                push(g, 1);
            }
        }
    }
    let elems: Vec<Elem> = seq.into_iter().map(|(g, n)| Elem { g, n, centered: false }).collect();
    let mut ev = FreeWordTrace { steps: &steps, memo: HashMap::new() };
    Ok(ev.tau(&elems))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ut(i: u32, t: f64) -> Letter {
        Letter::ut(i, t)
    }

    #[test]
    fn unitarity_and_single_letters() {
        let w = Word::new([ut(1, 0.7), ut(1, 0.7).adjoint()]);
        assert_eq!(ubm_word_moment(&w).unwrap(), 1.0);
        let m = ubm_word_moment(&Word::letter(ut(1, 0.8))).unwrap();
        assert!((m - (-0.4f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn increment_decomposition() {
        // ũ(1) ũ(0.5)* = w₂ is distributed as ũ(0.5)
        let w = Word::new([ut(1, 1.0), ut(1, 0.5).adjoint()]);
        assert!((ubm_word_moment(&w).unwrap() - (-0.25f64).exp()).abs() < 1e-14);
        // ũ(0.5)* ũ(1) = w₁* w₂ w₁, same trace by cyclicity.
        let w = Word::new([ut(1, 0.5).adjoint(), ut(1, 1.0)]);
        assert!((ubm_word_moment(&w).unwrap() - (-0.25f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn distinct_indices_factorize() {
        let w = Word::new([ut(1, 0.6), ut(2, 0.3)]);
        assert!((ubm_word_moment(&w).unwrap() - (-0.3f64).exp() * (-0.15f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn alternating_free_pair() {
        // τ(a b a* b*) for free unitaries with τ(a)=α, τ(b)=β: |α|²+|β|²−|α|²|β|².
        let (s, r) = (0.4, 0.9);
        let w = Word::new([ut(1, s), ut(2, r), ut(1, s).adjoint(), ut(2, r).adjoint()]);
        let a2 = (-s as f64).exp();
        let b2 = (-r as f64).exp();
        assert!((ubm_word_moment(&w).unwrap() - (a2 + b2 - a2 * b2)).abs() < 1e-14);
    }

    #[test]
    fn rejects_mixed_families() {
        assert!(ubm_word_moment(&Word::new([ut(1, 0.2), Letter::v(1, 0.2)])).is_err());
        assert!(ubm_word_moment(&Word::new([Letter::x(1)])).is_err());
    }
}

//! Conditional expectation onto the past algebra.
//!
//! A word is cut into maximal blocks that are either past (letters `x`, `u`,
//! `x^lib`) or free (letters `ũ` or `v`). The free blocks generate an algebra
//! free from the past, so `E` is computed by repeatedly splitting a block into
//! its trace plus its centered part:
//!
//! * a free block `b = τ(b) + b̊` with `τ(b)` from [`ubm_word_moment`],
//! * a past block `a = Tr(a) + å` with `Tr(a)` kept as a trace symbol,
//! * a product starting and ending with centered free blocks and alternating
//!   with centered past blocks has expectation zero,
//! * past blocks at either end factor out of `E`.
//!
//! When a block collapses to its scalar, its neighbours merge and the
//! expansion continues. Each step removes a block or centers one, so the
//! recursion terminates.

use std::collections::HashMap;

use num_complex::Complex64 as C64;

use super::trace_poly::TracePoly;
use super::ubm_word::ubm_word_moment;
use crate::error::{LabError, Result};
use crate::nc_algebra::{NCPoly, Time, Word};

/// Hard cap on `ũ`/`v` letters per word entering the recursion.
pub const FREE_LETTER_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Side {
    Past,
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Block {
    side: Side,
    word: Word,
    centered: bool,
}

impl Block {
    fn raw(side: Side, word: Word) -> Self {
        Block { side, word, centered: false }
    }
}

/// `coef · Π Tr(traces) · left · E(seq) · right`.
#[derive(Clone, Debug)]
struct Partial {
    coef: C64,
    traces: Vec<Word>,
    left: Word,
    seq: Vec<Block>,
    right: Word,
}

/// Reusable evaluator holding memo tables. Results do not depend on the
/// order of calls.
#[derive(Default)]
pub struct CondExpect {
    memo: HashMap<Vec<Block>, TracePoly>,
    tau: HashMap<Word, f64>,
}

impl CondExpect {
    pub fn new() -> Self {
        Self::default()
    }

    fn tau(&mut self, w: &Word) -> Result<f64> {
        if let Some(&v) = self.tau.get(w) {
            return Ok(v);
        }
        let v = ubm_word_moment(w)?;
        self.tau.insert(w.clone(), v);
        Ok(v)
    }

    /// Scalar part of a block: a number for free blocks, a trace symbol for
    /// past blocks.
    fn scalar(&mut self, b: &Block) -> Result<(C64, Vec<Word>)> {
        match b.side {
            Side::Free => Ok((C64::new(self.tau(&b.word)?, 0.0), vec![])),
            Side::Past => Ok((C64::new(1.0, 0.0), vec![b.word.clone()])),
        }
    }

    /// Product of two adjacent blocks of the same side, expanded into raw
    /// blocks: `(a − s_a)(b − s_b)` when both are centered.
    fn fuse(&mut self, a: &Block, b: &Block) -> Result<Vec<(C64, Vec<Word>, Block)>> {
        let side = a.side;
        let mut out = vec![(C64::new(1.0, 0.0), vec![], Block::raw(side, a.word.concat(&b.word)))];
        let sa = if a.centered { Some(self.scalar(a)?) } else { None };
        let sb = if b.centered { Some(self.scalar(b)?) } else { None };
        if let Some((c, tr)) = &sa {
            out.push((-c, tr.clone(), Block::raw(side, b.word.clone())));
        }
        if let Some((c, tr)) = &sb {
            out.push((-c, tr.clone(), Block::raw(side, a.word.clone())));
        }
        if let (Some((ca, ta)), Some((cb, tb))) = (sa, sb) {
            let tr = ta.into_iter().chain(tb).collect();
            out.push((ca * cb, tr, Block::raw(side, Word::empty())));
        }
        Ok(out)
    }

    /// Rewrites a partial term until its block sequence is empty or starts and
    /// ends with a free block, alternates sides and has no unit blocks.
    fn normalize(&mut self, mut p: Partial, out: &mut Vec<Partial>) -> Result<()> {
        if let Some(k) = p.seq.iter().position(|b| b.word.is_empty()) {
            if p.seq[k].centered {
                return Ok(());
            }
            p.seq.remove(k);
            return self.normalize(p, out);
        }
        if let Some(k) = (1..p.seq.len()).find(|&k| p.seq[k - 1].side == p.seq[k].side) {
            let (a, b) = (p.seq[k - 1].clone(), p.seq[k].clone());
            for (c, tr, blk) in self.fuse(&a, &b)? {
                let mut q = p.clone();
                q.coef *= c;
                q.traces.extend(tr);
                q.seq.splice(k - 1..k + 1, [blk]);
                self.normalize(q, out)?;
            }
            return Ok(());
        }
        if p.seq.first().is_some_and(|b| b.side == Side::Past) {
            let b = p.seq.remove(0);
            if b.centered {
                let mut q = p.clone();
                q.coef = -q.coef;
                q.traces.push(b.word.clone());
                self.normalize(q, out)?;
            }
            p.left = p.left.concat(&b.word);
            return self.normalize(p, out);
        }
        if p.seq.last().is_some_and(|b| b.side == Side::Past) {
            let b = p.seq.pop().expect("nonempty");
            if b.centered {
                let mut q = p.clone();
                q.coef = -q.coef;
                q.traces.push(b.word.clone());
                self.normalize(q, out)?;
            }
            p.right = b.word.concat(&p.right);
            return self.normalize(p, out);
        }
        out.push(p);
        Ok(())
    }

    fn expand(&mut self, p: Partial) -> Result<TracePoly> {
        let mut parts = Vec::new();
        self.normalize(p, &mut parts)?;
        let mut acc = TracePoly::zero();
        for q in parts {
            let inner = self.eval_seq(&q.seq)?;
            if inner.is_zero() {
                continue;
            }
            let lhs = TracePoly::term(q.traces, q.left, q.coef);
            acc = acc + lhs.multiply(&inner).multiply(&TracePoly::term([], q.right, C64::new(1.0, 0.0)));
        }
        Ok(acc)
    }

    /// `E` of a normalized block sequence.
    fn eval_seq(&mut self, seq: &[Block]) -> Result<TracePoly> {
        if seq.is_empty() {
            return Ok(TracePoly::one());
        }
        if let Some(v) = self.memo.get(seq) {
            return Ok(v.clone());
        }
        let result = match seq.iter().position(|b| !b.centered) {
            None => TracePoly::zero(),
            Some(k) => {
                let mut centered = seq.to_vec();
                centered[k].centered = true;
                let a = self.eval_seq(&centered)?;
                let (c, tr) = self.scalar(&seq[k])?;
                let mut removed = seq.to_vec();
                removed[k] = Block::raw(seq[k].side, Word::empty());
                let b = self.expand(Partial { coef: c, traces: tr, left: Word::empty(), seq: removed, right: Word::empty() })?;
                a + b
            }
        };
        self.memo.insert(seq.to_vec(), result.clone());
        Ok(result)
    }

    /// `E` of a single word; past letters must have time `≤ t`.
    pub fn word(&mut self, w: &Word, t: Time) -> Result<TracePoly> {
        let mut free_count = 0;
        let mut seq: Vec<Block> = Vec::new();
        for l in w.letters() {
            let side = if l.is_free_family() {
                free_count += 1;
                Side::Free
            } else {
                if let Some(lt) = l.time() {
                    if lt > t {
                        return Err(LabError::FutureLetter { op: "cond_expect_past", letter: *l, t });
                    }
                }
                Side::Past
            };
            match seq.last_mut() {
                Some(b) if b.side == side => b.word.push(*l),
                _ => seq.push(Block::raw(side, Word::letter(*l))),
            }
        }
        if free_count > FREE_LETTER_CAP {
            return Err(LabError::DegreeCap { count: free_count, cap: FREE_LETTER_CAP });
        }
        self.expand(Partial { coef: C64::new(1.0, 0.0), traces: vec![], left: Word::empty(), seq, right: Word::empty() })
    }

    pub fn poly(&mut self, p: &NCPoly, t: Time) -> Result<TracePoly> {
        let mut acc = TracePoly::zero();
        for (w, c) in p.terms() {
            acc = acc + self.word(w, t)?.scale(*c);
        }
        Ok(acc)
    }

    /// Applies `E` to the carriers of a trace polynomial whose symbols are
    /// already past elements.
    pub fn trace_poly(&mut self, tp: &TracePoly, t: Time) -> Result<TracePoly> {
        let mut acc = TracePoly::zero();
        for (symbols, carrier, c) in tp.terms() {
            if let Some(l) = symbols.iter().flat_map(|s| s.letters()).find(|l| l.is_free_family()) {
                return Err(LabError::UnexpectedLetter { op: "cond_expect_past (trace symbol)", letter: *l });
            }
            let e = self.word(carrier, t)?;
            acc = acc + TracePoly::term(symbols.clone(), Word::empty(), *c).multiply(&e);
        }
        Ok(acc)
    }
}

/// `E_∞(p)`: conditional expectation onto the past algebra at time `t`.
pub fn cond_expect_past(p: &NCPoly, t: Time) -> Result<TracePoly> {
    CondExpect::new().poly(p, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nc_algebra::Letter;

    fn tm(s: f64) -> Time {
        Time::from_secs(s)
    }

    #[test]
    fn identity_on_past() {
        let p = NCPoly::word([Letter::x(1), Letter::u(1, 0.3), Letter::x(2)]);
        assert_eq!(cond_expect_past(&p, tm(0.5)).unwrap(), TracePoly::from(&p));
    }

    #[test]
    fn single_free_letter() {
        let p = NCPoly::letter(Letter::ut(1, 0.6));
        let e = cond_expect_past(&p, tm(0.5)).unwrap();
        assert!(e.approx_eq(&TracePoly::one().scale(C64::new((-0.3f64).exp(), 0.0)), 1e-15));
    }

    #[test]
    fn conjugation_by_free_unitary() {
        // E(v* w v) = e^{-s} w + (1 − e^{-s}) Tr(w)
        let s = 0.7;
        let w = Word::new([Letter::xl(1, 1, 0.2), Letter::x_family(2, 1)]);
        let p = NCPoly::from(Word::letter(Letter::v_star(1, s)).concat(&w).concat(&Word::letter(Letter::v(1, s))));
        let got = cond_expect_past(&p, tm(0.2)).unwrap();
        let q = (-s as f64).exp();
        let expected = TracePoly::term([], w.clone(), C64::new(q, 0.0)) + TracePoly::trace_symbol(w).scale(C64::new(1.0 - q, 0.0));
        assert!(got.approx_eq(&expected, 1e-14), "{got}");
    }

    #[test]
    fn rejects_future_past_letters() {
        let p = NCPoly::letter(Letter::u(1, 0.9));
        assert!(cond_expect_past(&p, tm(0.5)).is_err());
    }

    #[test]
    fn degree_cap() {
        let w = Word::new((0..13).map(|k| Letter::ut(1 + (k % 2), 0.1 * (k + 1) as f64)));
        assert!(matches!(cond_expect_past(&NCPoly::from(w), tm(0.0)), Err(LabError::DegreeCap { .. })));
    }
}

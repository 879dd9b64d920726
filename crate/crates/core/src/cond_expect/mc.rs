//! Monte Carlo conditional expectation: average `π_N(Π^t p)` over fresh
//! inner unitary Brownian motions grafted at time `t`.

use std::collections::{BTreeMap, BTreeSet};

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::matrix_sim::linalg::{identity, mm, CMat};
use crate::matrix_sim::{eval_word, propagator, sample_hermitian_increment, stream_rng, MatrixSource, Scheme, XMatrices, DOMAIN_INNER};
use crate::nc_algebra::{pi_t, Letter, NCPoly, Time};

struct Grafted<'a> {
    outer: &'a (dyn MatrixSource + Sync),
    inner: BTreeMap<(u32, Time), CMat>,
}

impl MatrixSource for Grafted<'_> {
    fn x_matrices(&self) -> &XMatrices {
        self.outer.x_matrices()
    }

    fn components(&self) -> u32 {
        self.outer.components()
    }

    fn unitary(&self, i: u32, t: Time) -> Result<Option<&CMat>> {
        self.outer.unitary(i, t)
    }

    fn free_unitary(&self, l: &Letter) -> Result<Option<&CMat>> {
        let (i, s) = match *l {
            Letter::UT { i, t, .. } | Letter::V { i, t, .. } => (i, t),
            other => return Err(LabError::UnexpectedLetter { op: "mc_cond_expect", letter: other }),
        };
        if s.is_zero() {
            return Ok(None);
        }
        self.inner.get(&(i, s)).map(Some).ok_or(LabError::MissingSnapshot(s))
    }
}

fn sum_pairwise(ms: &[CMat]) -> CMat {
    match ms.len() {
        1 => ms[0].clone(),
        n => {
            let (a, b) = ms.split_at(n / 2);
            &sum_pairwise(a) + &sum_pairwise(b)
        }
    }
}

/// `E[π_N(p) | F_t]` estimated with `replicas` inner paths `V` stepped at
/// `dt` and grafted as `U(s) = V(s − t) U(t)`. `key` seeds the inner streams.
pub fn mc_cond_expect(p: &NCPoly, t: Time, src: &(dyn MatrixSource + Sync), dt: Time, replicas: usize, key: u64) -> Result<CMat> {
    if replicas == 0 {
        return Err(LabError::InvalidArgument("mc_cond_expect needs at least one replica".into()));
    }
    let q = pi_t(t, p);
    let mut needed: BTreeMap<u32, BTreeSet<Time>> = BTreeMap::new();
    for l in q.letters() {
        if let Letter::UT { i, t: s, .. } | Letter::V { i, t: s, .. } = *l {
            if !s.is_zero() {
                if s.ticks() % dt.ticks() != 0 {
                    return Err(LabError::InvalidArgument(format!("graft time {s} is not a multiple of dt = {dt}")));
                }
                needed.entry(i).or_default().insert(s);
            }
        }
    }
    let size = src.size();
    let per_replica: Vec<CMat> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut inner = BTreeMap::new();
            for (&i, times) in &needed {
                let mut rng = stream_rng(key, DOMAIN_INNER, ((r as u64) << 16) | i as u64);
                let mut v = identity(size);
                let last = *times.iter().next_back().expect("nonempty");
                let steps = last.ticks() / dt.ticks();
                for k in 1..=steps {
                    let h = sample_hermitian_increment(size, dt.secs(), &mut rng);
                    v = mm(propagator(Scheme::Exponential, &h, None, dt.secs())?.as_ref(), v.as_ref());
                    let s = Time::from_ticks(k * dt.ticks());
                    if times.contains(&s) {
                        inner.insert((i, s), v.clone());
                    }
                }
            }
            let g = Grafted { outer: src, inner };
            let mut acc: CMat = Mat::zeros(size, size);
            for (w, c) in q.terms() {
                let m = eval_word(&g, w)?;
                acc = &acc + &Mat::from_fn(size, size, |a, b| m[(a, b)] * *c);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let total = sum_pairwise(&per_replica);
    Ok(Mat::from_fn(size, size, |a, b| total[(a, b)] / C64::new(replicas as f64, 0.0)))
}

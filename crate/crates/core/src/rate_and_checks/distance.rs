//! The truncated tracial metric
//! `d(φ₁, φ₂) = Σ_{ℓ ≤ ℓ_max} Σ_{m ≤ m_max} 2^{-ℓ} (2R)^{-m} max_{|w| ≤ m} sup_{t ∈ [0,ℓ]} |(φ₁ − φ₂)(w)|`
//! with the sup taken over a finite time grid.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::oracle::TraceOracle;
use crate::error::{LabError, Result};
use crate::nc_algebra::{Letter, Time, Word};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub l_max: u32,
    pub m_max: usize,
    /// Times at which `u_i(t)` letters are placed; zero is skipped since
    /// `u(0) = 1`.
    pub times: Vec<Time>,
    pub components: u32,
    /// Indices `j` of the `x_j` letters.
    pub x_indices: Vec<u32>,
    pub norm_cap: f64,
}

impl CorpusSpec {
    pub fn alphabet(&self) -> Vec<Letter> {
        let mut out: Vec<Letter> = self.x_indices.iter().map(|&j| Letter::x(j)).collect();
        for i in 1..=self.components {
            for &t in self.times.iter().filter(|t| !t.is_zero()) {
                out.push(Letter::u(i, t));
                out.push(Letter::u_star(i, t));
            }
        }
        out
    }

    /// All words of length `1..=m_max`, reduced and deduplicated by cyclic
    /// class, with their lengths before reduction.
    pub fn words(&self) -> Vec<(Word, usize)> {
        let alphabet = self.alphabet();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut layer: Vec<Vec<Letter>> = vec![vec![]];
        for m in 1..=self.m_max {
            let mut next = Vec::with_capacity(layer.len() * alphabet.len());
            for w in &layer {
                for l in &alphabet {
                    let mut v = w.clone();
                    v.push(*l);
                    let word = Word::new(v.iter().copied());
                    if seen.insert(word.cyclic_canonical()) {
                        out.push((word, m));
                    }
                    next.push(v);
                }
            }
            layer = next;
        }
        out
    }
}

/// A distance value with the matching weighted sum of per-word standard
/// errors `sqrt(se₁² + se₂²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub value: f64,
    pub band: f64,
}

/// `d(φ₁, φ₂)` truncated to `spec`.
pub fn tracial_distance(o1: &dyn TraceOracle, o2: &dyn TraceOracle, spec: &CorpusSpec) -> Result<f64> {
    Ok(tracial_distance_with_band(o1, o2, spec)?.value)
}

pub fn tracial_distance_with_band(o1: &dyn TraceOracle, o2: &dyn TraceOracle, spec: &CorpusSpec) -> Result<DistanceEstimate> {
    if spec.norm_cap <= 0.0 {
        return Err(LabError::InvalidArgument("corpus norm cap must be positive".into()));
    }
    let words = spec.words();
    // Per (length, last time) the largest difference and error.
    let mut table: HashMap<(usize, Time), (f64, f64)> = HashMap::new();
    for (w, m) in &words {
        let diff = (o1.trace(w)? - o2.trace(w)?).norm();
        let se = o1.stderr(w)?.hypot(o2.stderr(w)?);
        let t = w.max_time().unwrap_or(Time::ZERO);
        let e = table.entry((*m, t)).or_insert((0.0, 0.0));
        e.0 = e.0.max(diff);
        e.1 = e.1.max(se);
    }
    let mut value = 0.0;
    let mut band = 0.0;
    for l in 1..=spec.l_max {
        let horizon = Time::from_secs(l as f64);
        for m in 1..=spec.m_max {
            let (mut d, mut s) = (0.0f64, 0.0f64);
            for (&(len, t), &(dv, sv)) in &table {
                if len <= m && t <= horizon {
                    d = d.max(dv);
                    s = s.max(sv);
                }
            }
            let weight = 1.0 / (2f64.powi(l as i32) * (2.0 * spec.norm_cap).powi(m as i32));
            value += weight * d;
            band += weight * s;
        }
    }
    Ok(DistanceEstimate { value, band })
}

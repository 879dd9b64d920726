//! Deterministic matrices `X_{g,j}`: plain family `g = 0`, liberation
//! families `g = 1..=n+1`.

use std::collections::BTreeMap;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::Deserialize;

use super::config::{SimConfig, XSpec};
use super::linalg::{hermitian_eigenvalues, CMat};
use crate::error::{LabError, Result};

#[derive(Clone, Debug)]
pub struct XMatrices {
    size: usize,
    mats: BTreeMap<(u32, u32), CMat>,
    /// Diagonals of the matrices that are exactly diagonal.
    diagonals: BTreeMap<(u32, u32), Vec<C64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileEntry {
    g: u32,
    j: u32,
    re: Vec<Vec<f64>>,
    im: Option<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSpec {
    matrices: Vec<FileEntry>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl XMatrices {
    pub fn build(cfg: &SimConfig) -> Result<Self> {
        let n = cfg.size;
        let r = cfg.norm_cap;
        let mut mats = BTreeMap::new();
        let keys: Vec<(u32, u32)> =
            (0..=cfg.components + 1).flat_map(|g| (1..=cfg.x_families).map(move |j| (g, j))).collect();
        match &cfg.x_spec {
            XSpec::Zero => {
                for k in keys {
                    mats.insert(k, Mat::zeros(n, n));
                }
            }
            XSpec::DiagonalGrid => {
                for (idx, k) in keys.into_iter().enumerate() {
                    let mut step = 1 + 2 * idx;
                    while gcd(step, n) != 1 {
                        step += 1;
                    }
                    let m = Mat::from_fn(n, n, |a, b| {
                        if a == b {
                            let p = (a * step + idx) % n;
                            C64::new(r * (2.0 * (p as f64 + 0.5) / n as f64 - 1.0), 0.0)
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    });
                    mats.insert(k, m);
                }
            }
            XSpec::File { path } => {
                let text = std::fs::read_to_string(path)?;
                let spec: FileSpec = serde_json::from_str(&text)
                    .map_err(|e| LabError::Config { path: path.display().to_string(), msg: e.to_string() })?;
                for e in spec.matrices {
                    if e.re.len() != n || e.re.iter().any(|row| row.len() != n) {
                        return Err(LabError::Config {
                            path: path.display().to_string(),
                            msg: format!("matrix ({}, {}) is not {n}x{n}", e.g, e.j),
                        });
                    }
                    let im = e.im.unwrap_or_else(|| vec![vec![0.0; n]; n]);
                    let m = Mat::from_fn(n, n, |a, b| C64::new(e.re[a][b], im[a][b]));
                    mats.insert((e.g, e.j), m);
                }
            }
        }
        let diagonals = mats
            .iter()
            .filter(|(_, m)| (0..n).all(|c| (0..n).all(|r| r == c || m[(r, c)] == C64::new(0.0, 0.0))))
            .map(|(k, m)| (*k, (0..n).map(|d| m[(d, d)]).collect()))
            .collect();
        let out = XMatrices { size: n, mats, diagonals };
        out.check(r)?;
        Ok(out)
    }

    fn check(&self, r: f64) -> Result<()> {
        for ((g, j), m) in &self.mats {
            let n = m.nrows();
            let asym = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| (m[(a, b)] - m[(b, a)].conj()).norm()).fold(0.0, f64::max);
            if asym > 1e-12 {
                return Err(LabError::NotSelfAdjoint(format!("X({g},{j})")));
            }
            let ev = hermitian_eigenvalues(m.as_ref())?;
            let norm = ev.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if norm > r * (1.0 + 1e-12) {
                return Err(LabError::InvalidArgument(format!("||X({g},{j})|| = {norm} exceeds R = {r}")));
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, g: u32, j: u32) -> Result<&CMat> {
        self.mats.get(&(g, j)).ok_or(LabError::MissingMatrix { g, j })
    }

    /// Diagonal entries when `X_{g,j}` is diagonal.
    pub fn diagonal(&self, g: u32, j: u32) -> Option<&[C64]> {
        self.diagonals.get(&(g, j)).map(Vec::as_slice)
    }

    pub fn keys(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.mats.keys().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_grid_respects_norm_and_differs_by_family() {
        let mut cfg = SimConfig::new(8, 2, 1.0, 0.1, 1, 0);
        cfg.norm_cap = 2.0;
        let x = XMatrices::build(&cfg).unwrap();
        assert_eq!(x.keys().count(), 4);
        let a = x.get(0, 1).unwrap();
        let b = x.get(1, 1).unwrap();
        assert!((0..8).all(|k| a[(k, k)].re.abs() <= 2.0));
        assert!((0..8).any(|k| a[(k, k)] != b[(k, k)]));
        let mut spectrum: Vec<f64> = (0..8).map(|k| b[(k, k)].re).collect();
        spectrum.sort_by(f64::total_cmp);
        assert!((spectrum[0] + 1.75).abs() < 1e-15 && (spectrum[7] - 1.75).abs() < 1e-15);
        assert!(x.get(4, 1).is_err());
    }
}

//! Simulation configuration.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};
use crate::nc_algebra::{NCPoly, Time};

/// Recipe for the deterministic matrices `X_{g,j}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum XSpec {
    /// Diagonal matrices whose entries are an evenly spaced grid on `(−R, R)`,
    /// permuted differently for every `(g, j)`.
    DiagonalGrid,
    /// JSON file `{"matrices": [{"g", "j", "re", "im"}]}`.
    File { path: PathBuf },
    Zero,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `U' = exp(i(ΔH + ξΔt)) U`.
    #[default]
    Exponential,
    /// `U' = U + i(ΔH + ξΔt) U − ½ U Δt`; not unitary, for cross-checks.
    Euler,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DriftMode {
    /// Projected gradients from [`crate::cond_expect`] evaluated on the sample.
    Symbolic,
    /// Inner Monte Carlo conditional expectation with this many replicas.
    InnerMc { replicas: usize },
}

/// Self-adjoint potential `c` driving the dynamics.
#[derive(Clone, Debug, PartialEq)]
pub struct Drift {
    pub potential: NCPoly,
    pub mode: DriftMode,
}

fn default_true() -> bool {
    true
}

fn default_families() -> u32 {
    1
}

fn default_memory_cap() -> u64 {
    4 << 30
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Matrix size `N`.
    #[serde(rename = "N")]
    pub size: usize,
    /// Number of unitary components `n`.
    #[serde(rename = "n")]
    pub components: u32,
    #[serde(rename = "T")]
    pub horizon: Time,
    pub dt: Time,
    pub snapshot_times: Vec<Time>,
    pub samples: usize,
    pub seed: u64,
    /// Operator norm cap `R` for the `X` matrices.
    #[serde(rename = "R")]
    pub norm_cap: f64,
    #[serde(rename = "X_spec")]
    pub x_spec: XSpec,
    /// Number of `j` indices per `X` family.
    #[serde(default = "default_families")]
    pub x_families: u32,
    /// Per-component horizons, each `≤ T`; defaults to `T` for all.
    #[serde(default)]
    pub horizons: Option<Vec<Time>>,
    #[serde(default)]
    pub scheme: Scheme,
    /// Evolve and store `U`. Off when only `b` is needed.
    #[serde(default = "default_true")]
    pub track_u: bool,
    /// Accumulate `b_Δ` at the snapshot times.
    #[serde(default)]
    pub record_b: bool,
    #[serde(default = "default_memory_cap")]
    pub memory_cap_bytes: u64,
    #[serde(skip)]
    pub drift: Option<Drift>,
}

impl SimConfig {
    /// Driftless config with the diagonal grid recipe, `R = 1`, snapshots at `T`.
    pub fn new(size: usize, components: u32, horizon: f64, dt: f64, samples: usize, seed: u64) -> Self {
        SimConfig {
            size,
            components,
            horizon: Time::from_secs(horizon),
            dt: Time::from_secs(dt),
            snapshot_times: vec![Time::from_secs(horizon)],
            samples,
            seed,
            norm_cap: 1.0,
            x_spec: XSpec::DiagonalGrid,
            x_families: 1,
            horizons: None,
            scheme: Scheme::Exponential,
            track_u: true,
            record_b: false,
            memory_cap_bytes: default_memory_cap(),
            drift: None,
        }
    }

    pub fn with_snapshots(mut self, times: &[f64]) -> Self {
        self.snapshot_times = times.iter().map(|&t| Time::from_secs(t)).collect();
        self
    }

    pub fn with_snapshot_times(mut self, times: impl IntoIterator<Item = Time>) -> Self {
        let mut v: Vec<Time> = times.into_iter().collect();
        v.sort();
        v.dedup();
        self.snapshot_times = v;
        self
    }

    /// Symbolic drift from the potential `c`.
    pub fn with_drift(mut self, c: &NCPoly) -> Self {
        self.drift = Some(Drift { potential: c.clone(), mode: DriftMode::Symbolic });
        self
    }

    pub fn steps(&self) -> usize {
        (self.horizon.ticks() / self.dt.ticks()) as usize
    }

    pub fn horizon_of(&self, i: usize) -> Time {
        self.horizons.as_ref().map_or(self.horizon, |h| h[i])
    }

    fn err(msg: impl Into<String>) -> LabError {
        LabError::Config { path: "sim".into(), msg: msg.into() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Self::err("N must be positive"));
        }
        if self.components == 0 {
            return Err(Self::err("n must be positive"));
        }
        if self.dt.ticks() <= 0 {
            return Err(Self::err("dt must be positive"));
        }
        if self.horizon.ticks() % self.dt.ticks() != 0 {
            return Err(Self::err(format!("T = {} is not a multiple of dt = {}", self.horizon, self.dt)));
        }
        for &t in &self.snapshot_times {
            if t.ticks() % self.dt.ticks() != 0 || t > self.horizon {
                return Err(Self::err(format!("snapshot time {t} is not a multiple of dt in [0, T]")));
            }
        }
        if self.samples == 0 {
            return Err(Self::err("samples must be positive"));
        }
        if !(self.norm_cap > 0.0) {
            return Err(Self::err("R must be positive"));
        }
        if let Some(h) = &self.horizons {
            if h.len() != self.components as usize {
                return Err(Self::err("horizons must have one entry per component"));
            }
            if h.iter().any(|&t| t > self.horizon || t.ticks() % self.dt.ticks() != 0) {
                return Err(Self::err("component horizons must be multiples of dt and at most T"));
            }
        }
        if let Some(d) = &self.drift {
            if !self.track_u {
                return Err(Self::err("a drift needs track_u = true"));
            }
            if !d.potential.is_self_adjoint(crate::nc_algebra::SYMBOLIC_REL_TOL) {
                return Err(LabError::NotSelfAdjoint(d.potential.to_string()));
            }
            if let DriftMode::InnerMc { replicas: 0 } = d.mode {
                return Err(Self::err("inner_samples must be at least 1"));
            }
        }
        let per_matrix = (self.size * self.size * 16) as u64;
        let per_sample = self.snapshot_times.len() as u64 * self.components as u64 * per_matrix;
        let copies = self.track_u as u64 + self.record_b as u64;
        let bytes = per_sample * copies * self.samples as u64;
        if bytes > self.memory_cap_bytes {
            return Err(LabError::MemoryCap { bytes, cap: self.memory_cap_bytes });
        }
        Ok(())
    }

    /// Hex SHA-256 of the serialized config together with the drift potential.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(self).expect("config serializes"));
        if let Some(d) = &self.drift {
            h.update(d.potential.to_string().as_bytes());
            h.update(format!("{:?}", d.mode).as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let cfg = SimConfig::new(16, 2, 1.0, 1e-3, 4, 7).with_snapshots(&[0.5, 1.0]);
        let s = serde_json::to_string(&cfg).unwrap();
        let back: SimConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cfg);
        let bad = s.replacen('{', "{\"bogus\":1,", 1);
        assert!(serde_json::from_str::<SimConfig>(&bad).is_err());
    }

    #[test]
    fn validation() {
        assert!(SimConfig::new(16, 1, 1.0, 1e-3, 4, 7).validate().is_ok());
        assert!(SimConfig::new(16, 1, 1.0, 3e-3, 4, 7).validate().is_err());
        assert!(SimConfig::new(16, 1, 1.0, 1e-3, 4, 7).with_snapshots(&[0.0005]).validate().is_err());
        let mut big = SimConfig::new(1024, 4, 1.0, 1e-3, 1000, 7);
        big.snapshot_times = (1..=10).map(|k| Time::from_secs(0.1 * k as f64)).collect();
        assert!(matches!(big.validate(), Err(LabError::MemoryCap { .. })));
    }
}

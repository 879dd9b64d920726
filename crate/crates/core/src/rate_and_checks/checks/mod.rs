//! The named verification battery.

mod drifted;
mod process;
mod symbolic;

pub use drifted::*;
pub use process::*;
pub use symbolic::*;

use serde_json::json;

use super::report::CheckReport;
use crate::error::Result;
use crate::matrix_sim::{SimConfig, XSpec};
use crate::nc_algebra::{Letter, NCPoly, Time};

/// Sizes, sample counts and the potential used by the checks. Defaults follow
/// the acceptance settings.
#[derive(Clone, Debug)]
pub struct CheckSettings {
    pub size: usize,
    pub samples: usize,
    pub dt: Time,
    pub seed: u64,
    pub norm_cap: f64,
    pub x_spec: XSpec,
    /// Self-adjoint potential of the drifted checks.
    pub potential: NCPoly,
    /// Random cases per symbolic check.
    pub cases: usize,
    pub small_size: usize,
    pub small_samples: usize,
    pub semicircle_size: usize,
    pub semicircle_samples: usize,
    pub girsanov_size: usize,
    pub girsanov_samples: usize,
    pub girsanov_horizon: Time,
    /// `(N, samples)` pairs of the residual comparison, smallest `N` first.
    pub residual_runs: Vec<(usize, usize)>,
    pub residual_dt: Time,
    pub distance_sizes: Vec<usize>,
    pub distance_samples: usize,
    pub distance_dt: Time,
}

/// `0.1 (x₁ u₁(0.5) + u₁(0.5)* x₁)`.
pub fn default_potential() -> NCPoly {
    let p = NCPoly::word([Letter::x(1), Letter::u(1, 0.5)]) + NCPoly::word([Letter::u_star(1, 0.5), Letter::x(1)]);
    p.scale(num_complex::Complex64::new(0.1, 0.0))
}

impl Default for CheckSettings {
    fn default() -> Self {
        CheckSettings {
            size: 128,
            samples: 200,
            dt: Time::from_secs(1e-3),
            seed: 20240611,
            norm_cap: 1.0,
            x_spec: XSpec::DiagonalGrid,
            potential: default_potential(),
            cases: 100,
            small_size: 16,
            small_samples: 4,
            semicircle_size: 256,
            semicircle_samples: 4,
            girsanov_size: 8,
            girsanov_samples: 500,
            girsanov_horizon: Time::from_secs(0.5),
            residual_runs: vec![(32, 48), (128, 48)],
            residual_dt: Time::from_secs(1e-3),
            distance_sizes: vec![32, 64, 128, 256],
            distance_samples: 16,
            distance_dt: Time::from_secs(1e-2),
        }
    }
}

impl CheckSettings {
    /// Defaults with the main ensemble taken from `sim` and an optional
    /// potential.
    pub fn from_sim(sim: &SimConfig, potential: Option<NCPoly>) -> Self {
        let mut s = CheckSettings {
            size: sim.size,
            samples: sim.samples,
            dt: sim.dt,
            seed: sim.seed,
            norm_cap: sim.norm_cap,
            x_spec: sim.x_spec.clone(),
            ..Default::default()
        };
        if let Some(c) = potential {
            s.potential = c;
        }
        s
    }
}

pub const CHECK_NAMES: &[&str] = &[
    "ubm_moments",
    "lemma4_1_martingale",
    "lemma4_5_covariance",
    "eq4_3_isometry",
    "lemma4_6_selfadjoint",
    "lemma4_7_infinitesimal",
    "lemma4_10_semicircle",
    "cor4_13_sde_residual",
    "girsanov_martingale",
    "lemma6_1_intertwine",
    "lemma6_3_gradient",
    "lemma3_8_gradient",
    "thm3_12_residual",
    "thm5_4_convergence",
    "sec6_3_rate_relation",
];

/// Names of the checks that need no simulation.
pub const SYMBOLIC_CHECKS: &[&str] = &["lemma6_1_intertwine", "lemma6_3_gradient", "lemma3_8_gradient"];

fn dispatch(name: &str, s: &CheckSettings) -> Result<Vec<CheckReport>> {
    match name {
        "ubm_moments" => ubm_moments(s),
        "lemma4_1_martingale" => lemma4_1_martingale(s),
        "lemma4_5_covariance" => lemma4_5_covariance(s),
        "eq4_3_isometry" => eq4_3_isometry(s),
        "lemma4_6_selfadjoint" => lemma4_6_selfadjoint(s),
        "lemma4_7_infinitesimal" => lemma4_7_infinitesimal(s),
        "lemma4_10_semicircle" => lemma4_10_semicircle(s),
        "cor4_13_sde_residual" => cor4_13_sde_residual(s),
        "girsanov_martingale" => girsanov_martingale(s),
        "lemma6_1_intertwine" => lemma6_1_intertwine(s),
        "lemma6_3_gradient" => lemma6_3_gradient(s),
        "lemma3_8_gradient" => lemma3_8_gradient(s),
        "thm3_12_residual" => thm3_12_residual(s),
        "thm5_4_convergence" => thm5_4_convergence(s),
        "sec6_3_rate_relation" => sec6_3_rate_relation(s),
        other => Err(crate::error::LabError::InvalidArgument(format!("unknown check '{other}'"))),
    }
}

/// Runs the named check. Errors become a single failed report.
pub fn check_suite(name: &str, settings: &CheckSettings) -> Vec<CheckReport> {
    match dispatch(name, settings) {
        Ok(r) => r,
        Err(e) => vec![CheckReport::failure(name, json!({}), e.to_string())],
    }
}

/// Expands `all` and comma separated lists into check names.
pub fn resolve_names(spec: &str) -> Result<Vec<&'static str>> {
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "all" {
            out.extend_from_slice(CHECK_NAMES);
            continue;
        }
        match CHECK_NAMES.iter().find(|n| **n == part) {
            Some(n) => out.push(*n),
            None => return Err(crate::error::LabError::InvalidArgument(format!("unknown check '{part}'"))),
        }
    }
    out.dedup();
    Ok(out)
}

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::matrix_sim::{Drift, DriftMode, SimConfig};
use crate::nc_algebra::{parse_poly, NCPoly, Time};
use crate::rate_and_checks::{resolve_names, CheckSettings};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftModeName {
    #[default]
    Symbolic,
    Mc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSection {
    /// Self-adjoint potential `c` in the polynomial grammar.
    pub potential: String,
    #[serde(default)]
    pub mode: DriftModeName,
    /// Replicas per conditional expectation in `mc` mode.
    #[serde(default)]
    pub inner_samples: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSection {
    pub a: String,
    #[serde(rename = "T")]
    pub horizon: Time,
    /// Uniform subintervals of the integration grid, before letter times are added.
    #[serde(default = "default_grid_steps")]
    pub grid_steps: usize,
}

fn default_grid_steps() -> usize {
    50
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<ReportFormat>,
}

fn default_dir() -> PathBuf {
    PathBuf::from(".")
}

fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Json, ReportFormat::Csv]
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: default_dir(), formats: default_formats() }
    }
}

/// Top-level JSON document driving a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub sim: SimConfig,
    #[serde(default)]
    pub drift: Option<DriftSection>,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub rate: Option<RateSection>,
    #[serde(default)]
    pub output: OutputSection,
}

fn field_err(path: &str, e: impl std::fmt::Display) -> LabError {
    LabError::Config { path: path.into(), msg: e.to_string() }
}

/// Parses and validates a configuration document. Error paths name the
/// offending field, e.g. `sim.dt` or `drift.potential`.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        field_err(if path.is_empty() { "." } else { &path }, e.into_inner())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| field_err(&path.display().to_string(), e))?;
    parse_config(&text)
}

impl RunConfig {
    pub fn potential(&self) -> Result<Option<NCPoly>> {
        match &self.drift {
            None => Ok(None),
            Some(d) => {
                let c = parse_poly(&d.potential).map_err(|e| field_err("drift.potential", e))?;
                if !c.is_self_adjoint(crate::nc_algebra::SYMBOLIC_REL_TOL) {
                    return Err(field_err("drift.potential", "potential must be self-adjoint"));
                }
                Ok(Some(c))
            }
        }
    }

    pub fn rate_poly(&self) -> Result<Option<NCPoly>> {
        match &self.rate {
            None => Ok(None),
            Some(r) => parse_poly(&r.a).map(Some).map_err(|e| field_err("rate.a", e)),
        }
    }

    /// The simulation config with the drift section attached.
    pub fn sim_config(&self) -> Result<SimConfig> {
        let mut sim = self.sim.clone();
        if let (Some(d), Some(c)) = (&self.drift, self.potential()?) {
            let mode = match d.mode {
                DriftModeName::Symbolic => DriftMode::Symbolic,
                DriftModeName::Mc => DriftMode::InnerMc { replicas: d.inner_samples.unwrap_or(16) },
            };
            sim.drift = Some(Drift { potential: c, mode });
        }
        Ok(sim)
    }

    pub fn check_settings(&self) -> Result<CheckSettings> {
        Ok(CheckSettings::from_sim(&self.sim, self.potential()?))
    }

    fn validate(&self) -> Result<()> {
        self.sim_config()?.validate().map_err(|e| match e {
            LabError::Config { msg, .. } => field_err("sim", msg),
            other => field_err("sim", other),
        })?;
        self.rate_poly()?;
        if let Some(d) = &self.drift {
            if d.mode == DriftModeName::Mc && d.inner_samples == Some(0) {
                return Err(field_err("drift.inner_samples", "must be at least 1"));
            }
        }
        if !self.checks.is_empty() {
            resolve_names(&self.checks.join(",")).map_err(|e| field_err("checks", e))?;
        }
        if let Some(r) = &self.rate {
            if r.grid_steps == 0 {
                return Err(field_err("rate.grid_steps", "must be positive"));
            }
        }
        if self.output.formats.is_empty() {
            return Err(field_err("output.formats", "at least one format is required"));
        }
        Ok(())
    }
}

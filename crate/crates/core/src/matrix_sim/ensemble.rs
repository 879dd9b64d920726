//! Ensembles of independent sample paths.

use rayon::prelude::*;

use super::config::SimConfig;
use super::estimate::TraceEstimate;
use super::eval::{eval_trace_poly_scalar, eval_word_trace, MatrixSource};
use super::linalg::CMat;
use super::path::{simulate_sample, PathSample, Shared, StepObserver};
use super::xmats::XMatrices;
use crate::cond_expect::TracePoly;
use crate::error::{LabError, Result};
use crate::nc_algebra::{Time, Word};

pub struct UnitaryPathEnsemble {
    pub config: SimConfig,
    pub config_hash: String,
    pub x: XMatrices,
    pub samples: Vec<PathSample>,
}

/// One sample together with the shared `X` matrices.
pub struct SampleView<'a> {
    pub x: &'a XMatrices,
    pub sample: &'a PathSample,
}

impl MatrixSource for SampleView<'_> {
    fn x_matrices(&self) -> &XMatrices {
        self.x
    }

    fn components(&self) -> u32 {
        self.sample.u.len() as u32
    }

    fn unitary(&self, i: u32, t: Time) -> Result<Option<&CMat>> {
        let comp = self.sample.u.get((i as usize).wrapping_sub(1)).ok_or_else(|| LabError::IndexOutOfRange(format!("component {i}")))?;
        if t.is_zero() {
            return Ok(None);
        }
        comp.get(&t).map(Some).ok_or(LabError::MissingSnapshot(t))
    }
}

/// Simulates the ensemble described by `cfg`.
pub fn simulate_paths(cfg: &SimConfig) -> Result<UnitaryPathEnsemble> {
    simulate_with(cfg, |_| ()).map(|(e, _)| e)
}

/// Simulates with one observer per sample, built by `make`. Samples run in
/// parallel on the current rayon pool; results do not depend on its size.
pub fn simulate_with<O, F>(cfg: &SimConfig, make: F) -> Result<(UnitaryPathEnsemble, Vec<O>)>
where
    O: StepObserver,
    F: Fn(usize) -> O + Sync,
{
    let shared = Shared::new(cfg)?;
    let results: Vec<(PathSample, O)> = (0..cfg.samples)
        .into_par_iter()
        .map(|s| {
            let mut obs = make(s);
            let sample = simulate_sample(cfg, &shared, s, &mut obs)?;
            Ok((sample, obs))
        })
        .collect::<Result<_>>()?;
    let (samples, observers) = results.into_iter().unzip();
    let ens = UnitaryPathEnsemble { config: cfg.clone(), config_hash: cfg.hash(), x: shared.x, samples };
    Ok((ens, observers))
}

impl UnitaryPathEnsemble {
    pub fn view(&self, s: usize) -> SampleView<'_> {
        SampleView { x: &self.x, sample: &self.samples[s] }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Per-sample values of `f`, computed in parallel and returned in sample order.
    pub fn per_sample<T: Send>(&self, f: impl Fn(&SampleView<'_>) -> Result<T> + Sync) -> Result<Vec<T>> {
        (0..self.len()).into_par_iter().map(|s| f(&self.view(s))).collect()
    }

    /// `tr_N π_N(w)` averaged over samples.
    pub fn trace_estimate(&self, w: &Word) -> Result<TraceEstimate> {
        Ok(TraceEstimate::from_values(&self.per_sample(|v| eval_word_trace(v, w))?))
    }

    /// Scalar evaluation of a trace polynomial averaged over samples, with
    /// trace symbols taken per sample.
    pub fn trace_poly_estimate(&self, tp: &TracePoly) -> Result<TraceEstimate> {
        Ok(TraceEstimate::from_values(&self.per_sample(|v| eval_trace_poly_scalar(v, tp))?))
    }
}

/// `tr_N π_N(w)` on one sample.
pub fn eval_trace_estimate(w: &Word, ens: &UnitaryPathEnsemble) -> Result<TraceEstimate> {
    ens.trace_estimate(w)
}

/// `b_Δ(t_k)` of component `i` at the requested grid times.
pub fn stochastic_integral_b(sample: &PathSample, i: u32, grid: &[Time]) -> Result<Vec<CMat>> {
    let comp = sample.b.get((i as usize).wrapping_sub(1)).ok_or_else(|| LabError::IndexOutOfRange(format!("component {i}")))?;
    grid.iter()
        .map(|t| comp.get(t).cloned().ok_or(LabError::MissingSnapshot(*t)))
        .collect()
}


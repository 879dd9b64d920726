//! Single-sample time stepping.

use std::collections::{BTreeMap, BTreeSet};

use faer::Mat;
use num_complex::Complex64 as C64;

use super::config::{DriftMode, Scheme, SimConfig};
use super::eval::{eval_trace_poly, MatrixSource};
use super::expm::expm;
use super::gradients::{letter_times, GradientTable};
use super::linalg::{frobenius, hermitian_part, identity, mm, CMat};
use super::rng::{path_stream, sample_hermitian_increment, stream_rng, DOMAIN_PATH};
use super::xmats::XMatrices;
use crate::cond_expect::mc_cond_expect;
use crate::error::{LabError, Result};
use crate::nc_algebra::{d_u, Letter, Time};

/// Relative anti-Hermitian size above which a drift is rejected.
pub const DRIFT_SYMMETRY_TOL: f64 = 1e-8;

/// Realization of the process up to the current time `t`.
pub struct PathState<'a> {
    pub x: &'a XMatrices,
    pub t: Time,
    pub current: &'a [CMat],
    pub history: &'a [BTreeMap<Time, CMat>],
}

impl MatrixSource for PathState<'_> {
    fn x_matrices(&self) -> &XMatrices {
        self.x
    }

    fn components(&self) -> u32 {
        self.history.len() as u32
    }

    fn unitary(&self, i: u32, t: Time) -> Result<Option<&CMat>> {
        if i == 0 || i as usize > self.history.len() {
            return Err(LabError::IndexOutOfRange(format!("component {i}")));
        }
        if t.is_zero() {
            return Ok(None);
        }
        if t == self.t {
            return self.current.get(i as usize - 1).map(Some).ok_or(LabError::MissingSnapshot(t));
        }
        self.history[i as usize - 1].get(&t).map(Some).ok_or(LabError::MissingSnapshot(t))
    }
}

/// Everything known about one step `[t, t + dt]`.
pub struct StepContext<'a> {
    pub k: usize,
    pub dt: Time,
    /// State at the start of the step.
    pub state: &'a PathState<'a>,
    /// Components still inside their horizon.
    pub active: &'a [bool],
    pub dh: &'a [CMat],
    /// Step propagator `U(t + dt) U(t)⁻¹`.
    pub incr: &'a [CMat],
    /// Drift `ξ_i(t)`, absent when zero.
    pub xi: &'a [Option<CMat>],
}

/// Hook called at every step of a sample path.
pub trait StepObserver: Send {
    fn step(&mut self, ctx: &StepContext<'_>) -> Result<()>;

    /// Called with the state at the horizon.
    fn finish(&mut self, _state: &PathState<'_>) -> Result<()> {
        Ok(())
    }
}

impl StepObserver for () {
    fn step(&mut self, _ctx: &StepContext<'_>) -> Result<()> {
        Ok(())
    }
}

/// Read-only data shared by all samples of a run.
pub struct Shared {
    pub x: XMatrices,
    pub drift: DriftEngine,
    keep: BTreeSet<Time>,
}

pub enum DriftEngine {
    None,
    Symbolic(GradientTable),
    InnerMc { potential: crate::nc_algebra::NCPoly, replicas: usize },
}

impl Shared {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let x = XMatrices::build(cfg)?;
        let mut keep: BTreeSet<Time> = cfg.snapshot_times.iter().copied().collect();
        let drift = match &cfg.drift {
            None => DriftEngine::None,
            Some(d) => {
                for t in letter_times(&d.potential) {
                    if t.ticks() % cfg.dt.ticks() != 0 {
                        return Err(LabError::Config { path: "drift.potential".into(), msg: format!("letter time {t} is not a multiple of dt") });
                    }
                    keep.insert(t);
                }
                if let Some(l) = d.potential.letters().find(|l| !matches!(l, Letter::X { g: 0, .. } | Letter::U { .. })) {
                    return Err(LabError::UnexpectedLetter { op: "drift potential", letter: *l });
                }
                match d.mode {
                    DriftMode::Symbolic => {
                        DriftEngine::Symbolic(GradientTable::build(&d.potential, cfg.components, cfg.dt, cfg.steps())?)
                    }
                    DriftMode::InnerMc { replicas } => DriftEngine::InnerMc { potential: d.potential.clone(), replicas },
                }
            }
        };
        Ok(Shared { x, drift, keep })
    }
}

/// Output of one sample: snapshots of `U` and of `b_Δ` per component.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PathSample {
    pub u: Vec<BTreeMap<Time, CMat>>,
    pub b: Vec<BTreeMap<Time, CMat>>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_drift(xi: CMat) -> Result<CMat> {
    let h = hermitian_part(xi.as_ref());
    let dev = frobenius((&xi - &h).as_ref());
    if dev > DRIFT_SYMMETRY_TOL * frobenius(h.as_ref()).max(1.0) {
        return Err(LabError::NonHermitianDrift(dev));
    }
    Ok(h)
}

fn drift_at(cfg: &SimConfig, shared: &Shared, sample: usize, k: usize, i: u32, state: &PathState<'_>) -> Result<Option<CMat>> {
    match &shared.drift {
        DriftEngine::None => Ok(None),
        DriftEngine::Symbolic(table) => {
            let g = table.get(k, i);
            if g.is_zero() {
                return Ok(None);
            }
            Ok(Some(check_drift(eval_trace_poly(state, g)?)?))
        }
        DriftEngine::InnerMc { potential, replicas } => {
            let d = d_u(state.t, i, potential)?;
            if d.is_zero() {
                return Ok(None);
            }
            let key = splitmix(splitmix(splitmix(cfg.seed ^ sample as u64) ^ k as u64) ^ i as u64);
            Ok(Some(check_drift(mc_cond_expect(&d, state.t, state, cfg.dt, *replicas, key)?)?))
        }
    }
}

/// `exp(i(ΔH + ξ dt))` or its Euler counterpart.
pub fn propagator(scheme: Scheme, dh: &CMat, xi: Option<&CMat>, dt: f64) -> Result<CMat> {
    let n = dh.nrows();
    let gen = |r: usize, c: usize| {
        let mut v = dh[(r, c)];
        if let Some(x) = xi {
            v += x[(r, c)] * dt;
        }
        v
    };
    match scheme {
        Scheme::Exponential => expm(Mat::from_fn(n, n, |r, c| gen(r, c) * C64::new(0.0, 1.0)).as_ref()),
        Scheme::Euler => Ok(Mat::from_fn(n, n, |r, c| {
            let d = if r == c { 1.0 - 0.5 * dt } else { 0.0 };
            gen(r, c) * C64::new(0.0, 1.0) + d
        })),
    }
}

/// Runs sample `sample` to the horizon, feeding `obs` at every step.
pub fn simulate_sample(cfg: &SimConfig, shared: &Shared, sample: usize, obs: &mut dyn StepObserver) -> Result<PathSample> {
    let n = cfg.components as usize;
    let size = cfg.size;
    let dt = cfg.dt;
    let dts = dt.secs();
    let mut rngs: Vec<_> = (0..n).map(|i| stream_rng(cfg.seed, DOMAIN_PATH, path_stream(sample, i))).collect();
    let mut u: Vec<CMat> = (0..n).map(|_| identity(size)).collect();
    let mut history: Vec<BTreeMap<Time, CMat>> = vec![BTreeMap::new(); n];
    let mut b: Vec<CMat> = if cfg.record_b { (0..n).map(|_| Mat::zeros(size, size)).collect() } else { vec![] };
    let mut out = PathSample { u: vec![BTreeMap::new(); n], b: vec![BTreeMap::new(); n] };
    let snaps: BTreeSet<Time> = cfg.snapshot_times.iter().copied().collect();
    if snaps.contains(&Time::ZERO) {
        for i in 0..n {
            if cfg.track_u {
                out.u[i].insert(Time::ZERO, identity(size));
            }
            if cfg.record_b {
                out.b[i].insert(Time::ZERO, Mat::zeros(size, size));
            }
        }
    }
    let growth = C64::new((dts / 2.0).exp(), 0.0);
    for k in 0..cfg.steps() {
        let t = Time::from_ticks(dt.ticks() * k as i64);
        let active: Vec<bool> = (0..n).map(|i| t < cfg.horizon_of(i)).collect();
        let state = PathState { x: &shared.x, t, current: &u, history: &history };
        let mut xi = Vec::with_capacity(n);
        for i in 0..n {
            xi.push(if active[i] {
                drift_at(cfg, shared, sample, k, i as u32 + 1, &state)
                    .map_err(|e| LabError::DriftAtStep { step: k, source: Box::new(e) })?
            } else {
                None
            });
        }
        let mut dh = Vec::with_capacity(n);
        let mut incr = Vec::with_capacity(n);
        for i in 0..n {
            if active[i] {
                let h = sample_hermitian_increment(size, dts, &mut rngs[i]);
                incr.push(propagator(cfg.scheme, &h, xi[i].as_ref(), dts)?);
                dh.push(h);
            } else {
                dh.push(Mat::zeros(0, 0));
                incr.push(Mat::zeros(0, 0));
            }
        }
        obs.step(&StepContext { k, dt, state: &state, active: &active, dh: &dh, incr: &incr, xi: &xi })?;
        drop(state);
        let t_next = t + dt;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            if cfg.record_b {
                // Δb = −i(e^{dt/2} E − I) − ξ dt
                let e = &incr[i];
                let bi = &mut b[i];
                for c in 0..size {
                    for r in 0..size {
                        let mut v = e[(r, c)] * growth;
                        if r == c {
                            v -= 1.0;
                        }
                        let mut d = v * C64::new(0.0, -1.0);
                        if let Some(x) = &xi[i] {
                            d -= x[(r, c)] * dts;
                        }
                        bi[(r, c)] += d;
                    }
                }
                if snaps.contains(&t_next) {
                    out.b[i].insert(t_next, b[i].clone());
                }
            }
            if cfg.track_u {
                u[i] = mm(incr[i].as_ref(), u[i].as_ref());
                if shared.keep.contains(&t_next) {
                    history[i].insert(t_next, u[i].clone());
                }
                if snaps.contains(&t_next) {
                    out.u[i].insert(t_next, u[i].clone());
                }
            }
        }
    }
    let state = PathState { x: &shared.x, t: cfg.horizon, current: &u, history: &history };
    obs.finish(&state)?;
    Ok(out)
}

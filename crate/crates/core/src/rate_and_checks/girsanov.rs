//! The Girsanov exponent `I_{c,N}(t)` along simulated paths.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::rate::{gradient, letter_times_of, potential_bound, Alphabet};
use crate::cond_expect::{cond_expect_past, CondExpect, TracePoly};
use crate::error::{LabError, Result};
use crate::matrix_sim::linalg::{hermitian_part, ntrace_product};
use crate::matrix_sim::{simulate_with, EvalCache, PathState, SimConfig, StepContext, StepObserver};
use crate::nc_algebra::{pi_t, NCPoly, Time};

/// Symbolic pieces of `I_{c,N}` on the step grid `t_k = k·dt`, `k = 0..=K`.
#[derive(Debug)]
pub struct GirsanovTables {
    /// `E[c | F_{t_k}]`.
    cond: Vec<TracePoly>,
    /// `E(Π^{t_k} 𝔇_{t_k,i} c)` per component, right limits.
    grad: Vec<Vec<TracePoly>>,
    /// Left limits at the steps that are letter times of `c`.
    grad_left: BTreeMap<usize, Vec<TracePoly>>,
    record: BTreeSet<usize>,
    dt: f64,
    bound: f64,
}

impl GirsanovTables {
    pub fn build(c: &NCPoly, cfg: &SimConfig, grid: &[Time]) -> Result<Self> {
        let steps = cfg.steps();
        let last = c.max_time().unwrap_or(Time::ZERO);
        let mut ev = CondExpect::new();
        let mut cond = Vec::with_capacity(steps + 1);
        let mut grad = Vec::with_capacity(steps + 1);
        let mut grad_left = BTreeMap::new();
        let times = letter_times_of(c);
        for k in 0..=steps {
            let t = Time::from_ticks(cfg.dt.ticks() * k as i64);
            cond.push(cond_expect_past(&pi_t(t, c), t)?);
            let row = |right: bool, ev: &mut CondExpect| -> Result<Vec<TracePoly>> {
                (1..=cfg.components)
                    .map(|i| if t > last || (right && t == last) { Ok(TracePoly::zero()) } else { gradient(ev, c, i, t, Alphabet::Unitary, right) })
                    .collect()
            };
            grad.push(row(true, &mut ev)?);
            if times.contains(&t) {
                grad_left.insert(k, row(false, &mut ev)?);
            }
        }
        let mut record = BTreeSet::new();
        for t in grid {
            if t.ticks() % cfg.dt.ticks() != 0 || *t > cfg.horizon {
                return Err(LabError::InvalidArgument(format!("Girsanov grid time {t} is not a step time")));
            }
            record.insert((t.ticks() / cfg.dt.ticks()) as usize);
        }
        Ok(GirsanovTables { cond, grad, grad_left, record, dt: cfg.dt.secs(), bound: potential_bound(c, cfg.norm_cap) })
    }

    /// The bound `C_T` asserted on every recorded value.
    pub fn bound(&self) -> f64 {
        self.bound
    }
}

/// Accumulates `I_{c,N}(t_k)` along one path.
pub struct GirsanovObserver {
    tables: Arc<GirsanovTables>,
    m0: f64,
    integral: f64,
    prev: Option<f64>,
    pub values: Vec<(Time, f64)>,
}

impl GirsanovObserver {
    pub fn new(tables: Arc<GirsanovTables>) -> Self {
        GirsanovObserver { tables, m0: 0.0, integral: 0.0, prev: None, values: Vec::new() }
    }

    fn visit(&mut self, k: usize, state: &PathState<'_>) -> Result<()> {
        let tb = Arc::clone(&self.tables);
        let mut cache = EvalCache::new(state);
        let f = energy(&mut cache, &tb.grad[k])?;
        let f_left = match tb.grad_left.get(&k) {
            Some(row) => energy(&mut cache, row)?,
            None => f,
        };
        let m = cache.trace_poly_scalar(&tb.cond[k])?.re;
        match self.prev {
            None => self.m0 = m,
            Some(p) => self.integral += 0.5 * tb.dt * (p + f_left),
        }
        self.prev = Some(f);
        if tb.record.contains(&k) {
            let v = m - self.m0 - 0.5 * self.integral;
            if v > tb.bound + 1e-9 {
                return Err(LabError::InvalidArgument(format!("Girsanov exponent {v} exceeds its bound {}", tb.bound)));
            }
            self.values.push((state.t, v));
        }
        Ok(())
    }
}

/// `Σ_i tr_N(ξ_i²)` with `ξ_i` the Hermitian part of the evaluated gradient.
fn energy(cache: &mut EvalCache<'_>, row: &[TracePoly]) -> Result<f64> {
    let mut f = 0.0;
    for g in row.iter().filter(|g| !g.is_zero()) {
        let xi = hermitian_part(cache.trace_poly(g)?.as_ref());
        f += ntrace_product(xi.as_ref(), xi.as_ref()).re;
    }
    Ok(f)
}

impl StepObserver for GirsanovObserver {
    fn step(&mut self, ctx: &StepContext<'_>) -> Result<()> {
        self.visit(ctx.k, ctx.state)
    }

    fn finish(&mut self, state: &PathState<'_>) -> Result<()> {
        self.visit(self.tables.cond.len() - 1, state)
    }
}

/// `I_{c,N}(t)` at the times of `grid` for every sample of the ensemble
/// described by `cfg`, whose own drift (if any) is used for sampling.
pub fn girsanov_exponent(cfg: &SimConfig, c: &NCPoly, grid: &[Time]) -> Result<Vec<Vec<(Time, f64)>>> {
    let mut cfg = cfg.clone();
    let mut snaps: BTreeSet<Time> = cfg.snapshot_times.iter().copied().collect();
    snaps.extend(letter_times_of(c).into_iter().filter(|t| *t <= cfg.horizon));
    cfg.snapshot_times = snaps.into_iter().collect();
    let tables = Arc::new(GirsanovTables::build(c, &cfg, grid)?);
    let (_, obs) = simulate_with(&cfg, |_| GirsanovObserver::new(Arc::clone(&tables)))?;
    Ok(obs.into_iter().map(|o| o.values).collect())
}

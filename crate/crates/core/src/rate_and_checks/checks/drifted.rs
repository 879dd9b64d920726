//! Checks on drifted ensembles and on the Girsanov exponent.

use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as C64;
use serde_json::json;

use super::CheckSettings;
use crate::cond_expect::{projected_gradient_right_with, CondExpect, TracePoly};
use crate::error::{LabError, Result};
use crate::matrix_sim::linalg::{frobenius, identity, mm, ntrace_product};
use crate::matrix_sim::{simulate_paths, EvalCache, simulate_with, CMat, MatrixSource, PathState, SimConfig, StepContext, StepObserver, TraceEstimate, UnitaryPathEnsemble};
use crate::nc_algebra::{Letter, NCPoly, Time};
use crate::rate_and_checks::distance::{tracial_distance_with_band, CorpusSpec, DistanceEstimate};
use crate::rate_and_checks::girsanov::girsanov_exponent;
use crate::rate_and_checks::oracle::{EmpiricalOracle, Sigma0Frbm, TraceOracle, XMatrixOracle};
use crate::rate_and_checks::rate::{components_of, letter_times_of};
use crate::rate_and_checks::report::CheckReport;

fn drifted_config(s: &CheckSettings, size: usize, samples: usize, horizon: Time, dt: Time) -> SimConfig {
    let mut cfg = SimConfig::new(size, components_of(&s.potential).into_iter().max().unwrap_or(1), horizon.secs(), dt.secs(), samples, s.seed).with_drift(&s.potential);
    cfg.norm_cap = s.norm_cap;
    cfg.x_spec = s.x_spec.clone();
    cfg
}

/// `E[exp(N² I_{c,N}(T))] = 1` under the driftless measure.
pub fn girsanov_martingale(s: &CheckSettings) -> Result<Vec<CheckReport>> {
    let n = components_of(&s.potential).into_iter().max().unwrap_or(1);
    let t_end = s.girsanov_horizon;
    let mut cfg = SimConfig::new(s.girsanov_size, n, t_end.secs(), s.dt.secs(), s.girsanov_samples, s.seed).with_snapshot_times([t_end]);
    cfg.norm_cap = s.norm_cap;
    cfg.x_spec = s.x_spec.clone();
    let paths = girsanov_exponent(&cfg, &s.potential, &[Time::ZERO, t_end])?;
    let n2 = (s.girsanov_size * s.girsanov_size) as f64;
    let mut weights = Vec::with_capacity(paths.len());
    let mut worst: f64 = 0.0;
    for p in &paths {
        let (_, v) = p.last().ok_or_else(|| LabError::InvalidArgument("empty Girsanov path".into()))?;
        worst = worst.max(v.abs());
        weights.push((n2 * v).exp());
    }
    let e = TraceEstimate::from_real(&weights);
    let params = json!({
        "size": s.girsanov_size, "samples": s.girsanov_samples, "T": t_end.secs(), "dt": s.dt.secs(),
        "potential": s.potential.to_string(), "max_abs_exponent": worst,
    });
    Ok(vec![CheckReport::new("girsanov_martingale", params, e.mean.re, 1.0, 0.0, Some(e.stderr))])
}

/// Grabs the drift of component 1 at one step.
struct DriftGrab {
    k: usize,
    xi: Option<CMat>,
}

impl StepObserver for DriftGrab {
    fn step(&mut self, ctx: &StepContext<'_>) -> Result<()> {
        if ctx.k == self.k {
            self.xi = ctx.xi[0].clone();
        }
        Ok(())
    }
}

/// Mean of `‖ΔU − (iΔb U + (iξ − ½) U Δt)‖ / √N` over one step at `t0`.
pub fn sde_step_residual(s: &CheckSettings, size: usize, samples: usize, t0: Time, dt: Time) -> Result<TraceEstimate> {
    let t1 = t0 + dt;
    let mut cfg = drifted_config(s, size, samples, t1, dt).with_snapshot_times([t0, t1]);
    cfg.record_b = true;
    let k = (t0.ticks() / dt.ticks()) as usize;
    let (ens, grabs) = simulate_with(&cfg, |_| DriftGrab { k, xi: None })?;
    let dts = dt.secs();
    let mut vals = Vec::with_capacity(ens.len());
    for (idx, g) in grabs.iter().enumerate() {
        let v = ens.view(idx);
        let u0 = v.unitary(1, t0)?.cloned().unwrap_or_else(|| identity(size));
        let u1 = v.unitary(1, t1)?.ok_or(LabError::MissingSnapshot(t1))?;
        let b0 = v.sample.b[0].get(&t0).cloned().unwrap_or_else(|| Mat::zeros(size, size));
        let b1 = v.sample.b[0].get(&t1).ok_or(LabError::MissingSnapshot(t1))?;
        let xi = g.xi.clone().unwrap_or_else(|| Mat::zeros(size, size));
        let i = C64::new(0.0, 1.0);
        let gen = Mat::from_fn(size, size, |r, c| {
            let mut z = (b1[(r, c)] - b0[(r, c)]) * i + xi[(r, c)] * i * dts;
            if r == c {
                z -= 0.5 * dts;
            }
            z
        });
        let pred = mm(gen.as_ref(), u0.as_ref());
        let res = Mat::from_fn(size, size, |r, c| u1[(r, c)] - u0[(r, c)] - pred[(r, c)]);
        vals.push(frobenius(res.as_ref()) / (size as f64).sqrt());
    }
    Ok(TraceEstimate::from_real(&vals))
}

/// One-step SDE residual divided by `Δt` shrinks like `√Δt` as `Δt` halves.
pub fn cor4_13_sde_residual(s: &CheckSettings) -> Result<Vec<CheckReport>> {
    let size = 2 * s.small_size;
    let samples = 4 * s.small_samples;
    let t0 = Time::from_secs(0.2);
    let dts = [4e-3, 2e-3, 1e-3];
    let mut scaled = Vec::new();
    for &d in &dts {
        let e = sde_step_residual(s, size, samples, t0, Time::from_secs(d))?;
        scaled.push((e.mean.re / d, e.stderr / d));
    }
    let mut out = Vec::new();
    for w in 0..dts.len() - 1 {
        let ratio = scaled[w + 1].0 / scaled[w].0;
        let params = json!({
            "t0": t0.secs(), "dt": [dts[w], dts[w + 1]], "residual_over_dt": [scaled[w].0, scaled[w + 1].0],
            "size": size, "samples": samples,
        });
        out.push(CheckReport::new("cor4_13_sde_residual", params, ratio, std::f64::consts::FRAC_1_SQRT_2, 0.1, None).with_note("ratio of residual/dt after halving dt"));
    }
    Ok(out)
}

/// Test polynomials of the residual comparison, all self-adjoint with letter
/// times in `{0.25, 0.5}`.
pub fn residual_test_polys() -> Vec<(String, NCPoly)> {
    let x = Letter::x(1);
    let u = |t: f64| Letter::u(1, t);
    let us = |t: f64| Letter::u_star(1, t);
    let w = |ls: &[Letter]| NCPoly::word(ls.iter().copied());
    let herm = |p: NCPoly| p.clone() + p.adjoint();
    let i = C64::new(0.0, 1.0);
    vec![
        ("u(.5) + h.c.".into(), herm(w(&[u(0.5)]))),
        ("i(u(.5) - u(.5)*)".into(), (w(&[u(0.5)]) - w(&[us(0.5)])).scale(i)),
        ("u(.5)^2 + h.c.".into(), herm(w(&[u(0.5), u(0.5)]))),
        ("x u(.5) + h.c.".into(), herm(w(&[x, u(0.5)]))),
        ("u(.25) u(.5)* + h.c.".into(), herm(w(&[u(0.25), us(0.5)]))),
        ("x u(.25) x u(.5)* + h.c.".into(), herm(w(&[x, u(0.25), x, us(0.5)]))),
        ("u(.5) x u(.5)* x + h.c.".into(), herm(w(&[u(0.5), x, us(0.5), x]))),
        ("x^2 u(.5) + h.c.".into(), herm(w(&[x, x, u(0.5)]))),
        ("u(.25) + h.c.".into(), herm(w(&[u(0.25)]))),
        ("u(.5) x u(.25)* + h.c.".into(), herm(w(&[u(0.5), x, us(0.25)]))),
    ]
}

/// Projected gradients of the test polynomials at every block start.
pub struct ResidualTables {
    polys: Vec<TracePoly>,
    /// `grads[b][p][i-1]`, right limits at `t = b·every·dt`.
    grads: Vec<Vec<Vec<TracePoly>>>,
    every: usize,
}

impl ResidualTables {
    pub fn build(polys: &[NCPoly], components: u32, dt: Time, steps: usize, every: usize) -> Result<Self> {
        let every = every.max(1);
        let block = Time::from_ticks(dt.ticks() * every as i64);
        for p in polys {
            if let Some(t) = letter_times_of(p).into_iter().find(|t| t.ticks() % block.ticks() != 0) {
                return Err(LabError::InvalidArgument(format!("letter time {t} is not a block boundary")));
            }
        }
        let mut ev = CondExpect::new();
        let mut grads = Vec::new();
        for b in 0..steps.div_ceil(every) {
            let t = Time::from_ticks(block.ticks() * b as i64);
            let mut per_poly = Vec::with_capacity(polys.len());
            for p in polys {
                let last = p.max_time().unwrap_or(Time::ZERO);
                let row = (1..=components)
                    .map(|i| if t >= last { Ok(TracePoly::zero()) } else { projected_gradient_right_with(&mut ev, p, i, t, false) })
                    .collect::<Result<Vec<_>>>()?;
                per_poly.push(row);
            }
            grads.push(per_poly);
        }
        Ok(ResidualTables { polys: polys.iter().map(TracePoly::from).collect(), grads, every })
    }
}

/// Per-sample pieces of `tr a(T) − Σ_i ∫ tr(G_i(a,t)(dH_i + ξ_i dt))`.
pub struct ResidualObserver {
    tables: Arc<ResidualTables>,
    current: Vec<Vec<Option<CMat>>>,
    sum_dh: Vec<CMat>,
    sum_xi: Vec<CMat>,
    /// `Σ tr(G dH)` per polynomial; zero mean.
    pub noise: Vec<f64>,
    /// `Σ tr(G ξ) dt` per polynomial.
    pub drift: Vec<f64>,
    /// `tr a(T)` per polynomial.
    pub terminal: Vec<f64>,
}

impl ResidualObserver {
    pub fn new(tables: Arc<ResidualTables>, components: usize, size: usize) -> Self {
        let np = tables.polys.len();
        ResidualObserver {
            tables,
            current: vec![vec![None; components]; np],
            sum_dh: vec![Mat::zeros(size, size); components],
            sum_xi: vec![Mat::zeros(size, size); components],
            noise: vec![0.0; np],
            drift: vec![0.0; np],
            terminal: vec![0.0; np],
        }
    }

    fn flush(&mut self) {
        for (p, row) in self.current.iter().enumerate() {
            for (i, g) in row.iter().enumerate() {
                if let Some(g) = g {
                    self.noise[p] += ntrace_product(g.as_ref(), self.sum_dh[i].as_ref()).re;
                    self.drift[p] += ntrace_product(g.as_ref(), self.sum_xi[i].as_ref()).re;
                }
            }
        }
        for m in self.sum_dh.iter_mut().chain(self.sum_xi.iter_mut()) {
            m.fill(C64::new(0.0, 0.0));
        }
    }
}

impl StepObserver for ResidualObserver {
    fn step(&mut self, ctx: &StepContext<'_>) -> Result<()> {
        let tb = Arc::clone(&self.tables);
        if ctx.k % tb.every == 0 {
            self.flush();
            let mut cache = EvalCache::new(ctx.state);
            for (p, row) in tb.grads[ctx.k / tb.every].iter().enumerate() {
                for (i, g) in row.iter().enumerate() {
                    self.current[p][i] = if g.is_zero() { None } else { Some(cache.trace_poly(g)?) };
                }
            }
        }
        let dt = ctx.dt.secs();
        for i in 0..ctx.active.len() {
            if !ctx.active[i] {
                continue;
            }
            self.sum_dh[i] += &ctx.dh[i];
            if let Some(xi) = &ctx.xi[i] {
                let sx = &mut self.sum_xi[i];
                *sx += Mat::from_fn(xi.nrows(), xi.ncols(), |r, c| xi[(r, c)] * dt);
            }
        }
        Ok(())
    }

    fn finish(&mut self, state: &PathState<'_>) -> Result<()> {
        self.flush();
        let mut cache = EvalCache::new(state);
        for (p, a) in self.tables.polys.iter().enumerate() {
            self.terminal[p] = cache.trace_poly_scalar(a)?.re;
        }
        Ok(())
    }
}

/// Residual of one drifted run for each test polynomial.
#[derive(Clone, Debug)]
pub struct ResidualRun {
    pub size: usize,
    pub samples: usize,
    /// `mean(tr a(T) − ∫⟨G, dH + ξ dt⟩) − σ₀^frBM(a)`, with its stderr.
    pub residual: Vec<(f64, f64)>,
    /// Without the zero-mean `∫⟨G, dH⟩` term, with its stderr.
    pub plain: Vec<(f64, f64)>,
}

/// Drifted run at size `size` evaluating `φ^T(a) − σ₀^frBM(a) − ∫ Σ_i ⟨g_i, ξ_i⟩ dt`.
pub fn thm3_12_run(s: &CheckSettings, polys: &[NCPoly], t_end: Time, size: usize, samples: usize, dt: Time, every: usize) -> Result<ResidualRun> {
    let mut times: Vec<Time> = polys.iter().flat_map(letter_times_of).collect();
    times.push(t_end);
    let cfg = drifted_config(s, size, samples, t_end, dt).with_snapshot_times(times);
    let n = cfg.components;
    let tables = Arc::new(ResidualTables::build(polys, n, dt, cfg.steps(), every)?);
    let (ens, obs) = simulate_with(&cfg, |_| ResidualObserver::new(Arc::clone(&tables), n as usize, size))?;
    let xo = XMatrixOracle::new(&ens.x);
    let sigma = Sigma0Frbm::new(&xo);
    let mut residual = Vec::with_capacity(polys.len());
    let mut plain = Vec::with_capacity(polys.len());
    for (p, a) in polys.iter().enumerate() {
        let s0 = sigma.eval_poly(a)?.re;
        let y: Vec<f64> = obs.iter().map(|o| o.terminal[p] - o.noise[p] - o.drift[p]).collect();
        let z: Vec<f64> = obs.iter().map(|o| o.terminal[p] - o.drift[p]).collect();
        let ey = TraceEstimate::from_real(&y);
        let ez = TraceEstimate::from_real(&z);
        residual.push((ey.mean.re - s0, ey.stderr));
        plain.push((ez.mean.re - s0, ez.stderr));
    }
    Ok(ResidualRun { size, samples, residual, plain })
}

/// Compares residual magnitudes between the smallest and largest run size.
pub fn thm3_12_compare(names: &[String], small: &ResidualRun, big: &ResidualRun, dt: Time) -> Vec<CheckReport> {
    let mut out = Vec::new();
    let mut wins = 0usize;
    for (p, name) in names.iter().enumerate() {
        let (rs, ss) = small.residual[p];
        let (rb, sb) = big.residual[p];
        if rb.abs() < rs.abs() {
            wins += 1;
        }
        let params = json!({
            "a": name, "dt": dt.secs(),
            "small": { "size": small.size, "samples": small.samples, "residual": rs, "stderr": ss, "plain": small.plain[p].0, "plain_stderr": small.plain[p].1 },
            "big": { "size": big.size, "samples": big.samples, "residual": rb, "stderr": sb, "plain": big.plain[p].0, "plain_stderr": big.plain[p].1 },
        });
        out.push(CheckReport::new("thm3_12_residual", params, rb.abs(), 0.0, rs.abs(), None).with_note("|residual| at the larger size against the smaller size"));
    }
    let total = names.len();
    let needed = (total * 4).div_ceil(5);
    let params = json!({ "polynomials": total, "required": needed, "small_size": small.size, "big_size": big.size });
    out.push(
        CheckReport::new("thm3_12_residual", params, wins as f64, total as f64, (total - needed) as f64, None)
            .with_note("number of test polynomials whose residual shrinks with N"),
    );
    out
}

pub fn thm3_12_residual(s: &CheckSettings) -> Result<Vec<CheckReport>> {
    let tests = residual_test_polys();
    let (names, polys): (Vec<String>, Vec<NCPoly>) = tests.into_iter().unzip();
    let t_end = Time::from_secs(0.5);
    let (&(n_small, m_small), &(n_big, m_big)) = match (s.residual_runs.first(), s.residual_runs.last()) {
        (Some(a), Some(b)) if s.residual_runs.len() >= 2 => (a, b),
        _ => return Err(LabError::InvalidArgument("thm3_12_residual needs two run sizes".into())),
    };
    let small = thm3_12_run(s, &polys, t_end, n_small, m_small, s.residual_dt, 1)?;
    let big = thm3_12_run(s, &polys, t_end, n_big, m_big, s.residual_dt, 1)?;
    Ok(thm3_12_compare(&names, &small, &big, s.residual_dt))
}

/// Corpus of the convergence check: words over `x₁, u_i(t), u_i(t)*`.
pub fn convergence_corpus(s: &CheckSettings) -> CorpusSpec {
    CorpusSpec {
        l_max: 1,
        m_max: 4,
        times: vec![Time::from_secs(0.25), Time::from_secs(0.5)],
        components: components_of(&s.potential).into_iter().max().unwrap_or(1),
        x_indices: vec![1],
        norm_cap: s.norm_cap,
    }
}

/// Drifted ensemble holding the corpus times.
pub fn convergence_ensemble(s: &CheckSettings, size: usize, corpus: &CorpusSpec) -> Result<UnitaryPathEnsemble> {
    let horizon = corpus.times.iter().copied().max().unwrap_or(Time::from_secs(0.5));
    let cfg = drifted_config(s, size, s.distance_samples, horizon, s.distance_dt).with_snapshot_times(corpus.times.iter().copied());
    simulate_paths(&cfg)
}

/// Consecutive distances must not increase by more than their bands.
pub fn thm5_4_compare(sizes: &[usize], dists: &[DistanceEstimate], samples: usize) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for k in 0..dists.len().saturating_sub(1) {
        let (a, b) = (dists[k], dists[k + 1]);
        let params = json!({
            "pairs": [[sizes[k], sizes[k + 1]], [sizes[k + 1], sizes[k + 2]]],
            "distances": [a.value, b.value], "bands": [a.band, b.band], "samples": samples,
        });
        out.push(
            CheckReport::new("thm5_4_convergence", params, (b.value - a.value).max(0.0), 0.0, a.band + b.band, None)
                .with_note("increase of d(N, 2N) from one size to the next"),
        );
    }
    out
}

pub fn thm5_4_convergence(s: &CheckSettings) -> Result<Vec<CheckReport>> {
    let corpus = convergence_corpus(s);
    let ensembles = s.distance_sizes.iter().map(|&n| convergence_ensemble(s, n, &corpus)).collect::<Result<Vec<_>>>()?;
    let oracles: Vec<EmpiricalOracle<'_>> = ensembles.iter().map(EmpiricalOracle::new).collect();
    let mut dists = Vec::new();
    for w in oracles.windows(2) {
        dists.push(tracial_distance_with_band(&w[0] as &dyn TraceOracle, &w[1], &corpus)?);
    }
    Ok(thm5_4_compare(&s.distance_sizes, &dists, s.distance_samples))
}

//! Monte Carlo checks on driftless ensembles: martingale property,
//! covariances, the stochastic integral `b` and its semicircle law.

use faer::Mat;
use num_complex::Complex64 as C64;
use serde_json::json;

use super::CheckSettings;
use crate::error::{LabError, Result};
use crate::free_moments::{semicircle_cauchy, semicircle_density, ubm_moment};
use crate::matrix_sim::linalg::{anti_hermitian_part, frobenius, hermitian_eigenvalues, hermitian_part, identity, mm, mm_adj, ntrace_product};
use crate::matrix_sim::{resolvent_trace, simulate_paths, CMat, MatrixSource, SampleView, SimConfig, TraceEstimate, UnitaryPathEnsemble};
use crate::nc_algebra::{Letter, Time, Word};
use crate::rate_and_checks::report::{CheckReport, Histogram};

fn u_at(v: &SampleView<'_>, i: u32, t: Time) -> Result<CMat> {
    Ok(v.unitary(i, t)?.cloned().unwrap_or_else(|| identity(v.size())))
}

fn b_at(v: &SampleView<'_>, i: u32, t: Time) -> Result<CMat> {
    let comp = v.sample.b.get(i as usize - 1).ok_or_else(|| LabError::IndexOutOfRange(format!("component {i}")))?;
    match comp.get(&t) {
        Some(b) => Ok(b.clone()),
        None if t.is_zero() => Ok(Mat::zeros(v.size(), v.size())),
        None => Err(LabError::MissingSnapshot(t)),
    }
}

fn lin(a: &CMat, ca: f64, b: &CMat, cb: f64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * ca + b[(i, j)] * cb)
}

/// `Z_i(s) − Z_i(r)` with `Z_i(t) = e^{t/2} U_i(t)`.
fn z_increment(v: &SampleView<'_>, i: u32, r: Time, s: Time) -> Result<CMat> {
    Ok(lin(&u_at(v, i, s)?, (s.secs() / 2.0).exp(), &u_at(v, i, r)?, -(r.secs() / 2.0).exp()))
}

fn word_matrix(v: &SampleView<'_>, w: &Word) -> Result<CMat> {
    crate::matrix_sim::eval_word(v, w)
}

fn tr4(a: &CMat, b: &CMat, c_adj: &CMat, d: &CMat) -> C64 {
    // tr(a b c* d)
    let ab = mm(a.as_ref(), b.as_ref());
    let abc = mm_adj(ab.as_ref(), c_adj.as_ref());
    ntrace_product(abc.as_ref(), d.as_ref())
}

fn estimate(values: &[C64]) -> TraceEstimate {
    TraceEstimate::from_values(values)
}

/// Driftless configuration used by the process checks.
pub fn process_config(settings: &CheckSettings, size: usize, components: u32, horizon: f64, snapshots: &[f64], record_b: bool) -> SimConfig {
    let mut cfg = SimConfig::new(size, components, horizon, settings.dt.secs(), settings.samples, settings.seed).with_snapshots(snapshots);
    cfg.norm_cap = settings.norm_cap;
    cfg.x_spec = settings.x_spec.clone();
    cfg.record_b = record_b;
    cfg
}

/// `tr_N E[U_1(t)^k]` against the free unitary Brownian moments.
pub fn ubm_moments_on(ens: &UnitaryPathEnsemble, t: Time, powers: &[i64], tol: f64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for &k in powers {
        let w = Word::new((0..k).map(|_| Letter::u(1, t.secs())));
        let e = ens.trace_estimate(&w)?;
        let expected = ubm_moment(k, t.secs())?;
        let params = json!({ "n": k, "t": t.secs(), "size": ens.config.size, "samples": ens.len() });
        out.push(CheckReport::new("ubm_moments", params, e.mean.re, expected, tol, Some(e.stderr)));
    }
    Ok(out)
}

/// `tr_N E[(Z_i(s) − Z_i(r)) A*] ≈ 0` for past words `A`.
pub fn lemma4_1_on(ens: &UnitaryPathEnsemble, r: Time, s: Time) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let n = ens.config.components;
    for i in 1..=n {
        let tests = [
            Word::empty(),
            Word::letter(Letter::x(1)),
            Word::letter(Letter::u(i, r)),
            Word::new([Letter::x(1), Letter::u(i, r)]),
        ];
        for a in &tests {
            let vals = ens.per_sample(|v| {
                let z = z_increment(v, i, r, s)?;
                let a_adj = word_matrix(v, &a.adjoint())?;
                Ok(ntrace_product(z.as_ref(), a_adj.as_ref()))
            })?;
            let e = estimate(&vals);
            let params = json!({ "i": i, "r": r.secs(), "s": s.secs(), "A": a.to_string(), "size": ens.config.size, "samples": ens.len() });
            out.push(CheckReport::new("lemma4_1_martingale", params, e.mean.norm(), 0.0, 0.02, Some(e.stderr)));
        }
    }
    Ok(out)
}

/// `tr_N E[(Z_i(s) − Z_i(r)) A (Z_j(s) − Z_j(r))* B] ≈ δ_ij (e^s − e^r) φ(a) φ(b)`.
pub fn lemma4_5_on(ens: &UnitaryPathEnsemble, r: Time, s: Time) -> Result<Vec<CheckReport>> {
    let n = ens.config.components;
    let x2 = Word::new([Letter::x(1), Letter::x(1)]);
    let mut cases = vec![(1, 1, Word::empty(), Word::empty())];
    if n >= 2 {
        cases.push((1, 2, Word::empty(), Word::empty()));
    }
    cases.push((1, 1, x2.clone(), x2.clone()));
    let growth = s.secs().exp() - r.secs().exp();
    let mut out = Vec::new();
    for (i, j, a, b) in cases {
        let vals = ens.per_sample(|v| {
            let zi = z_increment(v, i, r, s)?;
            let zj = if i == j { zi.clone() } else { z_increment(v, j, r, s)? };
            Ok(tr4(&zi, &word_matrix(v, &a)?, &zj, &word_matrix(v, &b)?))
        })?;
        let e = estimate(&vals);
        let pa = ens.trace_estimate(&a)?.mean.re;
        let pb = ens.trace_estimate(&b)?.mean.re;
        let (expected, tol) = if i == j { (growth * pa * pb, 0.05 * (growth * pa * pb).abs()) } else { (0.0, 0.02) };
        let params = json!({ "i": i, "j": j, "r": r.secs(), "s": s.secs(), "a": a.to_string(), "b": b.to_string(), "size": ens.config.size, "samples": ens.len() });
        let observed = if i == j { e.mean.re } else { e.mean.norm() };
        out.push(CheckReport::new("lemma4_5_covariance", params, observed, expected, tol, Some(e.stderr)));
    }
    Ok(out)
}

/// `tr_N E[(b(s) − b(r))²] ≈ s − r`.
pub fn eq4_3_on(ens: &UnitaryPathEnsemble, r: Time, s: Time) -> Result<Vec<CheckReport>> {
    let vals = ens.per_sample(|v| {
        let d = lin(&b_at(v, 1, s)?, 1.0, &b_at(v, 1, r)?, -1.0);
        Ok(ntrace_product(d.as_ref(), d.as_ref()))
    })?;
    let e = estimate(&vals);
    let expected = (s - r).secs();
    let params = json!({ "i": 1, "r": r.secs(), "s": s.secs(), "size": ens.config.size, "samples": ens.len() });
    Ok(vec![CheckReport::new("eq4_3_isometry", params, e.mean.re, expected, 0.05 * expected, Some(e.stderr))])
}

/// Largest relative anti-Hermitian part `‖b − b*‖/(2‖b‖)` of `b(t)`.
pub fn lemma4_6_on(ens: &UnitaryPathEnsemble, t: Time, tol: f64) -> Result<Vec<CheckReport>> {
    let vals = ens.per_sample(|v| {
        let b = b_at(v, 1, t)?;
        Ok(frobenius(anti_hermitian_part(b.as_ref()).as_ref()) / frobenius(b.as_ref()))
    })?;
    let worst = vals.iter().copied().fold(0.0, f64::max);
    let params = json!({ "t": t.secs(), "size": ens.config.size, "samples": ens.len() });
    Ok(vec![CheckReport::new("lemma4_6_selfadjoint", params, worst, 0.0, tol, None)])
}

/// `tr_N E[Δb_i A Δb_j B] / (s − r) ≈ δ_ij φ(a) φ(b)` for shrinking `s − r`.
pub fn lemma4_7_on(ens: &UnitaryPathEnsemble, r: Time, ends: &[Time]) -> Result<Vec<CheckReport>> {
    let n = ens.config.components;
    let a = Word::letter(Letter::u(1, r));
    let b = Word::letter(Letter::u_star(1, r));
    let pab = ens.trace_estimate(&a)?.mean * ens.trace_estimate(&b)?.mean;
    let mut out = Vec::new();
    for j in 1..=n.min(2) {
        for &s in ends {
            let h = (s - r).secs();
            let vals = ens.per_sample(|v| {
                let di = lin(&b_at(v, 1, s)?, 1.0, &b_at(v, 1, r)?, -1.0);
                let dj = if j == 1 { di.clone() } else { lin(&b_at(v, j, s)?, 1.0, &b_at(v, j, r)?, -1.0) };
                // tr(Δb_1 A Δb_j B) with Δb_j taken as is
                let am = word_matrix(v, &a)?;
                let bm = word_matrix(v, &b)?;
                let left = mm(mm(di.as_ref(), am.as_ref()).as_ref(), dj.as_ref());
                Ok(ntrace_product(left.as_ref(), bm.as_ref()) / h)
            })?;
            let e = estimate(&vals);
            let (expected, observed) = if j == 1 { (pab.re, e.mean.re) } else { (0.0, e.mean.norm()) };
            let params = json!({ "i": 1, "j": j, "r": r.secs(), "s": s.secs(), "a": a.to_string(), "b": b.to_string(), "size": ens.config.size, "samples": ens.len() });
            out.push(CheckReport::new("lemma4_7_infinitesimal", params, observed, expected, 0.05, Some(e.stderr)).with_note("covariance divided by s − r"));
        }
    }
    Ok(out)
}

/// Resolvent of `b(t)` against the semicircle Cauchy transform, the spectral
/// edge, and an eigenvalue histogram.
pub fn lemma4_10_on(ens: &UnitaryPathEnsemble, t: Time, zs: &[C64]) -> Result<Vec<CheckReport>> {
    let ts = t.secs();
    let mut out = Vec::new();
    let herm = ens.per_sample(|v| Ok(hermitian_part(b_at(v, 1, t)?.as_ref())))?;
    for &z in zs {
        let vals: Vec<C64> = herm.iter().map(|b| resolvent_trace(b, z)).collect::<Result<_>>()?;
        let e = estimate(&vals);
        let g = semicircle_cauchy(ts, z)?;
        for (part, obs, exp) in [("re", e.mean.re, g.re), ("im", e.mean.im, g.im)] {
            let params = json!({ "t": ts, "z": [z.re, z.im], "part": part, "size": ens.config.size, "samples": ens.len() });
            out.push(CheckReport::new("lemma4_10_semicircle", params, obs, exp, 0.02, Some(e.stderr)));
        }
    }
    let eigs: Vec<Vec<f64>> = herm.iter().map(|b| hermitian_eigenvalues(b.as_ref())).collect::<Result<_>>()?;
    let edge = eigs.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let radius = 2.0 * ts.sqrt();
    let hist = eigen_histogram(eigs.iter().flatten().copied(), ts, 48);
    let params = json!({ "t": ts, "quantity": "max |eigenvalue| beyond 2√t", "max_abs_eigenvalue": edge, "size": ens.config.size, "samples": ens.len() });
    let excess = (edge - radius).max(0.0);
    out.push(CheckReport::new("lemma4_10_semicircle", params, excess, 0.0, 0.05 * radius, None).with_histogram(hist));
    Ok(out)
}

/// Density histogram on `[−1.2·2√t, 1.2·2√t]` with the semicircle density.
pub fn eigen_histogram(values: impl Iterator<Item = f64>, t: f64, bins: usize) -> Histogram {
    let half = 1.2 * 2.0 * t.sqrt();
    let width = 2.0 * half / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut total = 0usize;
    for x in values {
        total += 1;
        let k = ((x + half) / width).floor();
        if k >= 0.0 && (k as usize) < bins {
            counts[k as usize] += 1;
        }
    }
    let x: Vec<f64> = (0..bins).map(|k| -half + (k as f64 + 0.5) * width).collect();
    let empirical = counts.iter().map(|&c| c as f64 / (total.max(1) as f64 * width)).collect();
    let theoretical = x.iter().map(|&xx| semicircle_density(t, xx).unwrap_or(0.0)).collect();
    Histogram { x, empirical, theoretical }
}

fn snap(ts: &[f64]) -> Vec<Time> {
    ts.iter().map(|&s| Time::from_secs(s)).collect()
}

pub fn ubm_moments(settings: &CheckSettings) -> Result<Vec<CheckReport>> {
    let cfg = process_config(settings, settings.size, 1, 1.0, &[0.5, 1.0], false);
    let ens = simulate_paths(&cfg)?;
    let mut out = ubm_moments_on(&ens, Time::from_secs(0.5), &[1, 2], 0.02)?;
    out.extend(ubm_moments_on(&ens, Time::from_secs(1.0), &[1, 2], 0.02)?);
    Ok(out)
}

pub fn lemma4_1_martingale(settings: &CheckSettings) -> Result<Vec<CheckReport>> {
    let cfg = process_config(settings, settings.size, 1, 0.5, &[0.25, 0.5], false);
    let t = snap(&[0.25, 0.5]);
    lemma4_1_on(&simulate_paths(&cfg)?, t[0], t[1])
}

pub fn lemma4_5_covariance(settings: &CheckSettings) -> Result<Vec<CheckReport>> {
    let cfg = process_config(settings, settings.size, 2, 0.5, &[0.25, 0.5], false);
    let t = snap(&[0.25, 0.5]);
    lemma4_5_on(&simulate_paths(&cfg)?, t[0], t[1])
}

pub fn eq4_3_isometry(settings: &CheckSettings) -> Result<Vec<CheckReport>> {
    let mut cfg = process_config(settings, settings.size, 1, 1.0, &[0.5, 1.0], true);
    cfg.track_u = false;
    let ens = simulate_paths(&cfg)?;
    let t = snap(&[0.0, 0.5, 1.0]);
    let mut out = eq4_3_on(&ens, t[1], t[2])?;
    out.extend(eq4_3_on(&ens, t[0], t[2])?);
    Ok(out)
}

pub fn lemma4_6_selfadjoint(settings: &CheckSettings) -> Result<Vec<CheckReport>> {
    let mut cfg = process_config(settings, settings.size, 1, 1.0, &[1.0], true);
    cfg.track_u = false;
    lemma4_6_on(&simulate_paths(&cfg)?, Time::from_secs(1.0), 0.05)
}

pub fn lemma4_7_infinitesimal(settings: &CheckSettings) -> Result<Vec<CheckReport>> {
    let cfg = process_config(settings, settings.size, 2, 0.7, &[0.5, 0.55, 0.6, 0.7], true);
    let t = snap(&[0.5, 0.7, 0.6, 0.55]);
    lemma4_7_on(&simulate_paths(&cfg)?, t[0], &t[1..])
}

/// Points where the resolvent is compared.
pub fn resolvent_points() -> Vec<C64> {
    vec![C64::new(0.0, 3.0), C64::new(1.0, 2.0), C64::new(-1.5, 1.0), C64::new(2.5, 0.5)]
}

pub fn lemma4_10_semicircle(settings: &CheckSettings) -> Result<Vec<CheckReport>> {
    let mut cfg = process_config(settings, settings.semicircle_size, 1, 1.0, &[1.0], true);
    cfg.track_u = false;
    cfg.samples = settings.semicircle_samples;
    let ens = simulate_paths(&cfg)?;
    let mut out = lemma4_10_on(&ens, Time::from_secs(1.0), &resolvent_points())?;
    out.extend(lemma4_6_on(&ens, Time::from_secs(1.0), 0.05)?);
    Ok(out)
}

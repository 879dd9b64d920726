//! The rate functional `I(φ; a, T)`, the closed form `I(φ_c)` and the drift
//! of a potential.

use std::collections::BTreeSet;

use super::oracle::{Sigma0Frbm, TraceOracle};
use crate::cond_expect::{cond_expect_past, projected_gradient_right_with, projected_gradient_with, CondExpect, TracePoly};
use crate::error::{LabError, Result};
use crate::nc_algebra::{pi_t, Letter, NCPoly, Time, SYMBOLIC_REL_TOL};

/// Alphabet in which a polynomial and its gradients are written.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alphabet {
    /// Letters `x`, `u`.
    Unitary,
    /// Letters `x^lib` plus static `x`.
    Liberation,
}

fn require_self_adjoint(a: &NCPoly) -> Result<()> {
    if a.is_self_adjoint(SYMBOLIC_REL_TOL) {
        Ok(())
    } else {
        Err(LabError::NotSelfAdjoint(a.to_string()))
    }
}

/// Component indices carried by `u` or `x^lib` letters of `a`.
pub fn components_of(a: &NCPoly) -> BTreeSet<u32> {
    a.letters()
        .filter_map(|l| match *l {
            Letter::U { i, .. } | Letter::XL { i, .. } => Some(i),
            _ => None,
        })
        .collect()
}

/// Nonzero letter times of `a`.
pub fn letter_times_of(a: &NCPoly) -> BTreeSet<Time> {
    a.letters().filter_map(|l| l.time()).filter(|t| !t.is_zero()).collect()
}

fn check_grid(grid: &[Time], times: &BTreeSet<Time>, upto: Time) -> Result<()> {
    if grid.first() != Some(&Time::ZERO) {
        return Err(LabError::InvalidArgument("integration grid must start at 0".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::InvalidArgument("integration grid must be strictly increasing".into()));
    }
    if let Some(t) = times.iter().find(|t| **t <= upto && grid.binary_search(t).is_err()) {
        return Err(LabError::InvalidArgument(format!("integration grid misses letter time {t}")));
    }
    Ok(())
}

/// Projected gradient `E_∞(Π^t(𝔇_{t,i} a))`; with `right_limit` the limit
/// from the right at `t`, where letters at time exactly `t` are no longer
/// differentiated.
pub fn gradient(ev: &mut CondExpect, a: &NCPoly, i: u32, t: Time, alphabet: Alphabet, right_limit: bool) -> Result<TracePoly> {
    let lib = alphabet == Alphabet::Liberation;
    if right_limit {
        projected_gradient_right_with(ev, a, i, t, lib)
    } else {
        projected_gradient_with(ev, a, i, t, lib)
    }
}

/// `‖g‖²_{L²} = φ(Tr(g g*))` under `oracle`.
pub fn l2_norm_sq(oracle: &dyn TraceOracle, g: &TracePoly) -> Result<f64> {
    if g.is_zero() {
        return Ok(0.0);
    }
    Ok(oracle.eval(&g.multiply(&g.adjoint()).trace())?.re)
}

/// `Tr(g g*)` summed over components, as a trace polynomial.
pub fn energy_density(ev: &mut CondExpect, a: &NCPoly, t: Time, alphabet: Alphabet, right_limit: bool) -> Result<TracePoly> {
    let mut acc = TracePoly::zero();
    for i in components_of(a) {
        let g = gradient(ev, a, i, t, alphabet, right_limit)?;
        acc = acc + g.multiply(&g.adjoint()).trace();
    }
    Ok(acc)
}

/// `∫ Σ_i ‖g_i(t)‖² dt` over `grid` by the trapezoid rule per subinterval,
/// using right limits at letter times.
pub fn energy_integral(oracle: &dyn TraceOracle, a: &NCPoly, grid: &[Time], alphabet: Alphabet) -> Result<f64> {
    let times = letter_times_of(a);
    let upto = *grid.last().unwrap_or(&Time::ZERO);
    check_grid(grid, &times, upto)?;
    let mut ev = CondExpect::new();
    let mut value = |t: Time, right: bool| -> Result<f64> {
        let right = right && times.contains(&t);
        Ok(oracle.eval(&energy_density(&mut ev, a, t, alphabet, right)?)?.re)
    };
    let mut total = 0.0;
    for w in grid.windows(2) {
        let h = (w[1] - w[0]).secs();
        total += 0.5 * h * (value(w[0], true)? + value(w[1], false)?);
    }
    Ok(total)
}

/// `I(φ; a, T) = φ^T(a) − σ₀^frBM(a) − ½ ∫₀ᵀ Σ_i ‖E(𝔇_{t,i} a)‖² dt`.
///
/// `σ₀^frBM` is built from the `x` marginal of `oracle`; `grid` runs from 0
/// to `T` and contains every letter time of `a` up to `T`.
pub fn rate_term(oracle: &dyn TraceOracle, a: &NCPoly, t_end: Time, grid: &[Time]) -> Result<f64> {
    require_self_adjoint(a)?;
    if grid.last() != Some(&t_end) {
        return Err(LabError::InvalidArgument(format!("integration grid must end at T = {t_end}")));
    }
    let phi_t = oracle.eval(&cond_expect_past(&pi_t(t_end, a), t_end)?)?.re;
    let sigma = Sigma0Frbm::new(oracle).eval_poly(a)?.re;
    let energy = energy_integral(oracle, a, grid, Alphabet::Unitary)?;
    Ok(phi_t - sigma - 0.5 * energy)
}

/// `I(φ_c) = ½ ∫ Σ_i ‖E(𝔇_{t,i} c)‖² dt`; `grid` must reach the last letter
/// time of `c`, beyond which the integrand vanishes.
pub fn rate_of_potential(oracle: &dyn TraceOracle, c: &NCPoly, grid: &[Time]) -> Result<f64> {
    rate_of_potential_in(oracle, c, grid, Alphabet::Unitary)
}

/// [`rate_of_potential`] for a potential written in a given alphabet.
pub fn rate_of_potential_in(oracle: &dyn TraceOracle, c: &NCPoly, grid: &[Time], alphabet: Alphabet) -> Result<f64> {
    require_self_adjoint(c)?;
    let last = c.max_time().unwrap_or(Time::ZERO);
    if grid.last().is_none_or(|t| *t < last) {
        return Err(LabError::InvalidArgument(format!("integration grid must reach {last}")));
    }
    let n = grid.partition_point(|t| *t <= last);
    let support = &grid[..n.max(1)];
    Ok(0.5 * energy_integral(oracle, c, support, alphabet)?)
}

/// A self-adjoint potential `c` with its drift `ξ_i(t)` tabulated on a grid.
#[derive(Clone, Debug)]
pub struct DriftSpec {
    pub potential: NCPoly,
    pub grid: Vec<Time>,
    /// `xi[k][i-1] = ξ_i(grid[k])`.
    pub xi: Vec<Vec<TracePoly>>,
}

impl DriftSpec {
    pub fn new(c: &NCPoly, components: u32, grid: &[Time]) -> Result<Self> {
        require_self_adjoint(c)?;
        let last = c.max_time().unwrap_or(Time::ZERO);
        let mut ev = CondExpect::new();
        let mut xi = Vec::with_capacity(grid.len());
        for &t in grid {
            let mut row = Vec::with_capacity(components as usize);
            for i in 1..=components {
                let g = if t > last { TracePoly::zero() } else { gradient(&mut ev, c, i, t, Alphabet::Unitary, false)? };
                if !g.approx_eq(&g.adjoint(), SYMBOLIC_REL_TOL) {
                    return Err(LabError::NotSelfAdjoint(format!("drift ξ_{i}({t}) = {g}")));
                }
                row.push(g);
            }
            xi.push(row);
        }
        Ok(DriftSpec { potential: c.clone(), grid: grid.to_vec(), xi })
    }

    /// `ξ_i(t)` at a grid time.
    pub fn xi(&self, i: u32, t: Time) -> Option<&TracePoly> {
        let k = self.grid.binary_search(&t).ok()?;
        self.xi[k].get((i as usize).checked_sub(1)?)
    }
}

/// `2 Σ_w |c_w| R^{#x(w)}`, a bound on `|tr E[π_N(c)|F_t]|` doubled.
pub fn potential_bound(c: &NCPoly, norm_cap: f64) -> f64 {
    2.0 * c
        .terms()
        .map(|(w, z)| {
            let xs = w.letters().iter().filter(|l| matches!(l, Letter::X { .. } | Letter::XL { .. })).count();
            z.norm() * norm_cap.powi(xs as i32)
        })
        .sum::<f64>()
}

/// Uniform grid `0, h, …, T` merged with extra times in `[0, T]`.
pub fn uniform_grid(t_end: Time, steps: usize, extra: impl IntoIterator<Item = Time>) -> Vec<Time> {
    let mut set: BTreeSet<Time> = (0..=steps).map(|k| Time::from_ticks(t_end.ticks() * k as i64 / steps.max(1) as i64)).collect();
    set.extend(extra.into_iter().filter(|t| *t <= t_end));
    set.into_iter().collect()
}

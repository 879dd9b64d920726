//! Projected gradients tabulated on the step grid.

use std::collections::BTreeSet;

use crate::cond_expect::{projected_gradient_right_with, CondExpect, TracePoly};
use crate::error::Result;
use crate::nc_algebra::{NCPoly, Time};

/// `E_∞(Π^{t_k}(𝔇_{t_k,i} a))` for every step time `t_k = k·dt` and
/// component, as a right limit so that it drives the step `(t_k, t_{k+1}]`.
#[derive(Clone, Debug)]
pub struct GradientTable {
    dt: Time,
    rows: Vec<Vec<TracePoly>>,
}

impl GradientTable {
    /// Tabulates gradients of `a` over `x`, `u` for `k = 0..steps`.
    pub fn build(a: &NCPoly, components: u32, dt: Time, steps: usize) -> Result<Self> {
        let mut ev = CondExpect::new();
        let last = a.max_time().unwrap_or(Time::ZERO);
        let mut rows = Vec::with_capacity(steps);
        for k in 0..steps {
            let t = Time::from_ticks(dt.ticks() * k as i64);
            let mut row = Vec::with_capacity(components as usize);
            for i in 1..=components {
                // Gradients vanish once every letter lies in the past.
                row.push(if t >= last { TracePoly::zero() } else { projected_gradient_right_with(&mut ev, a, i, t, false)? });
            }
            rows.push(row);
        }
        Ok(GradientTable { dt, rows })
    }

    pub fn dt(&self) -> Time {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.rows.len()
    }

    /// Gradient for component `i` (1-based) at step `k`.
    pub fn get(&self, k: usize, i: u32) -> &TracePoly {
        &self.rows[k][i as usize - 1]
    }
}

/// Letter times of `a`, which a simulation must keep to evaluate gradients.
pub fn letter_times(a: &NCPoly) -> BTreeSet<Time> {
    a.letters().filter_map(|l| l.time()).filter(|t| !t.is_zero()).collect()
}

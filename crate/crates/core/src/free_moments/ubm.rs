//! Moments `m_n(t) = τ(ũ(t)ⁿ)` of free unitary Brownian motion.
//!
//! The moments solve
//! `m_n' = −(n/2) m_n − (n/2) Σ_{k=1}^{n−1} m_k m_{n−k}`, `m_n(0) = 1`.
//! We integrate the rescaled unknowns `p_n = e^{nt/2} m_n`, which satisfy
//! `p_n' = −(n/2) Σ_{k=1}^{n−1} p_k p_{n−k}`, with an adaptive Dormand–Prince
//! 5(4) pair. The rescaling removes the stiff linear decay and leaves
//! polynomial solutions.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{LabError, Result};
use crate::nc_algebra::Time;

/// Relative local tolerance of the integrator. Far tighter than the 1e-10
/// contract so that symbolic identities built from these numbers cancel at
/// the 1e-12 level.
const RTOL: f64 = 1e-14;
/// Moments are computed in batches of at least this many powers.
const MIN_BATCH: usize = 16;

fn rhs(p: &[f64], out: &mut [f64]) {
    // p[k] holds p_{k+1}
    let n_max = p.len();
    for n in 1..=n_max {
        let mut s = 0.0;
        for k in 1..n {
            s += p[k - 1] * p[n - k - 1];
        }
        out[n - 1] = -0.5 * n as f64 * s;
    }
}

/// Dormand–Prince 5(4) integration of the rescaled hierarchy from 0 to `t`
/// for powers `1..=n_max`. Returns `m_1..m_{n_max}`.
pub(crate) fn integrate_hierarchy(n_max: usize, t: f64) -> Vec<f64> {
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let d = n_max;
    let mut y = vec![1.0; d];
    let mut x = 0.0;
    let mut h = (t / 64.0).min(1e-2);
    let mut k = vec![vec![0.0; d]; 7];
    let mut tmp = vec![0.0; d];
    let mut y5 = vec![0.0; d];
    while x < t {
        if x + h > t {
            h = t - x;
        }
        rhs(&y, &mut k[0]);
        for s in 1..7 {
            for m in 0..d {
                let mut acc = y[m];
                for r in 0..s {
                    acc += h * A[s][r] * k[r][m];
                }
                tmp[m] = acc;
            }
            rhs(&tmp, &mut k[s]);
        }
        let mut err: f64 = 0.0;
        for m in 0..d {
            let mut a5 = y[m];
            let mut a4 = y[m];
            for s in 0..7 {
                a5 += h * B5[s] * k[s][m];
                a4 += h * B4[s] * k[s][m];
            }
            y5[m] = a5;
            let scale = RTOL * (1.0 + y[m].abs().max(a5.abs()));
            err = err.max((a5 - a4).abs() / scale);
        }
        if err <= 1.0 {
            x += h;
            y.copy_from_slice(&y5);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-12 * t.max(1.0) {
            h = 1e-12 * t.max(1.0);
        }
    }
    (1..=d).map(|n| y[n - 1] * (-(n as f64) * t / 2.0).exp()).collect()
}

fn cache() -> &'static Mutex<HashMap<i64, Vec<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<i64, Vec<f64>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `m_n(t)` at a tick-exact time, memoized. `m_0 = 1`.
pub fn ubm_moment_at(n: usize, t: Time) -> f64 {
    if n == 0 || t.is_zero() {
        return 1.0;
    }
    {
        let guard = cache().lock().expect("moment cache poisoned");
        if let Some(v) = guard.get(&t.ticks()) {
            if n <= v.len() {
                return v[n - 1];
            }
        }
    }
    // Integrate outside the lock; a racing thread computes identical values.
    let n_max = n.max(MIN_BATCH);
    let v = integrate_hierarchy(n_max, t.secs());
    let out = v[n - 1];
    let mut guard = cache().lock().expect("moment cache poisoned");
    let entry = guard.entry(t.ticks()).or_default();
    if entry.len() < v.len() {
        *entry = v;
    }
    out
}

/// `m_n(t) = τ(ũ(t)ⁿ)` for `n ≥ 0`, `t ≥ 0`.
pub fn ubm_moment(n: i64, t: f64) -> Result<f64> {
    if n < 0 {
        return Err(LabError::InvalidArgument(format!("moment power must be >= 0, got {n}")));
    }
    if !(t >= 0.0) {
        return Err(LabError::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    Ok(ubm_moment_at(n as usize, Time::from_secs(t)))
}

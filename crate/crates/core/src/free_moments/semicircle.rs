//! Semicircle law of variance `t`: Cauchy transform, density, moments and the
//! Burgers characteristic identity.

use num_complex::Complex64 as C64;

use crate::error::{LabError, Result};

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(LabError::InvalidArgument(format!("variance t must be > 0, got {t}")))
    }
}

/// `G(t,z) = (z − √(z²−4t)) / (2t)` on the branch with `G ~ 1/z` at infinity.
///
/// The principal root `s = √(z²−4t)` has `Re s ≥ 0`. The correct branch must
/// satisfy `s ~ z`, i.e. `Re(s·z̄) ≥ 0`:
///
/// | quadrant of z       | principal s ok? |
/// |---------------------|-----------------|
/// | Re z > 0            | yes             |
/// | Re z < 0            | no, use −s      |
/// | Re z = 0, Im z > 0  | s is on i·ℝ₊ (ok) |
/// | Re z = 0, Im z < 0  | no, use −s      |
///
/// The sign test `Re(s·z̄) < 0 ⇒ s ↦ −s` implements all four rows.
pub fn semicircle_cauchy(t: f64, z: C64) -> Result<C64> {
    check_t(t)?;
    let mut s = (z * z - 4.0 * t).sqrt();
    if (s * z.conj()).re < 0.0 {
        s = -s;
    }
    Ok((z - s) / (2.0 * t))
}

/// `√(4t − x²)/(2πt)` on `[−2√t, 2√t]`, zero outside.
pub fn semicircle_density(t: f64, x: f64) -> Result<f64> {
    check_t(t)?;
    let r = 4.0 * t - x * x;
    Ok(if r > 0.0 { r.sqrt() / (2.0 * std::f64::consts::PI * t) } else { 0.0 })
}

/// `|G(t, z + t/z) − 1/z|`: zero along the characteristics of
/// `∂_t G + G ∂_z G = 0` started from `G(0,z) = 1/z`.
pub fn burgers_residual(t: f64, z: C64) -> Result<f64> {
    check_t(t)?;
    if z.norm() <= t.sqrt() {
        return Err(LabError::InvalidArgument(format!("|z| = {} must exceed sqrt(t) = {}", z.norm(), t.sqrt())));
    }
    let g = semicircle_cauchy(t, z + t / z)?;
    Ok((g - z.inv()).norm())
}

/// Catalan(k/2)·t^{k/2} for even `k`, zero for odd `k`.
pub fn semicircle_moment(k: u32, t: f64) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let m = (k / 2) as u64;
    // Catalan via the product formula, exact in f64 for the sizes used here.
    let mut c = 1.0_f64;
    for j in 0..m {
        c = c * (2 * (2 * j + 1)) as f64 / (j + 2) as f64;
    }
    c * t.powi(m as i32)
}

mod common;

use common::biane_moment;
use liblab::free_moments::{burgers_residual, semicircle_cauchy, semicircle_density, semicircle_moment, ubm_moment};
use liblab::matrix_sim::{eval_trace_estimate, simulate_paths, SimConfig};
use liblab::nc_algebra::{Letter, Time, Word};
use num_complex::Complex64 as C64;

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + h * k as f64) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    h / 3.0 * (f(a) + inner + f(b))
}

/// Semicircle integrals via `x = 2√t sin θ`, which removes the edge singularity.
fn semicircle_integral(t: f64, g: impl Fn(f64) -> f64) -> f64 {
    let r = 2.0 * t.sqrt();
    simpson(|th| g(r * th.sin()) * semicircle_density(t, r * th.sin()).unwrap() * r * th.cos(), -std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, 2000)
}

#[test]
fn hierarchy_matches_biane_closed_form() {
    for n in 0..=8u32 {
        for &t in &[0.1, 0.5, 1.0, 2.0, 4.0] {
            let (m, b) = (ubm_moment(n as i64, t).unwrap(), biane_moment(n, t));
            assert!((m - b).abs() < 1e-9, "n={n} t={t}: {m} vs {b}");
            assert!(m.abs() <= 1.0 + 1e-12);
        }
        assert_eq!(ubm_moment(n as i64, 0.0).unwrap(), 1.0);
    }
    assert!((ubm_moment(1, 1.0).unwrap() - (-0.5f64).exp()).abs() < 1e-10);
    assert!(ubm_moment(2, 1.0).unwrap().abs() < 1e-8);
}

#[test]
fn density_normalization_and_moments_by_quadrature() {
    for &t in &[0.25, 1.0, 2.0] {
        assert!((semicircle_integral(t, |_| 1.0) - 1.0).abs() < 1e-8);
        for k in 0..=6u32 {
            let q = semicircle_integral(t, |x| x.powi(k as i32));
            assert!((q - semicircle_moment(k, t)).abs() < 1e-8, "k={k} t={t}");
        }
    }
    assert!((semicircle_moment(4, 1.0) - 2.0).abs() < 1e-15);
    assert!((semicircle_density(1.0, 0.0).unwrap() - std::f64::consts::FRAC_1_PI).abs() < 1e-12);
}

#[test]
fn cauchy_transform_by_quadrature_and_inversion() {
    let t = 1.0;
    for z in [C64::new(0.0, 3.0), C64::new(1.0, 0.5), C64::new(-2.5, 0.2)] {
        let re = semicircle_integral(t, |x| (1.0 / (z - x)).re);
        let im = semicircle_integral(t, |x| (1.0 / (z - x)).im);
        let g = semicircle_cauchy(t, z).unwrap();
        assert!((g - C64::new(re, im)).norm() < 1e-6, "{z}: {g} vs {re}+{im}i");
    }
    for &x in &[-1.9, -0.7, 0.0, 0.4, 1.5] {
        let inv = -semicircle_cauchy(t, C64::new(x, 1e-6)).unwrap().im / std::f64::consts::PI;
        assert!((inv - semicircle_density(t, x).unwrap()).abs() < 1e-5);
    }
    assert!((semicircle_cauchy(1.0, C64::new(0.0, 3.0)).unwrap() - C64::new(0.0, -0.302776)).norm() < 1e-6);
}

#[test]
fn burgers_equation_by_finite_differences() {
    let (t, z, h) = (1.0, C64::new(0.0, 3.0), 1e-4);
    let g = |t: f64, z: C64| semicircle_cauchy(t, z).unwrap();
    let dt = (g(t + h, z) - g(t - h, z)) / (2.0 * h);
    let dz = (g(t, z + h) - g(t, z - h)) / (2.0 * h);
    assert!((dt + g(t, z) * dz).norm() <= 1e-6);
    for &t in &[0.1, 0.5, 1.0, 2.0, 3.0] {
        for z in [C64::new(0.0, 2.0), C64::new(1.0, 2.0), C64::new(-3.0, 1.9), C64::new(2.0, 2.5), C64::new(0.5, 4.0)] {
            assert!(burgers_residual(t, z).unwrap() <= 1e-12);
        }
    }
}

#[test]
fn series_matches_transform() {
    let (t, z) = (1.0, C64::new(0.0, 5.0));
    let s: C64 = (0..=20u32).map(|k| semicircle_moment(k, t) / z.powu(k + 1)).sum();
    assert!((s - semicircle_cauchy(t, z).unwrap()).norm() < 1e-6);
}

#[test]
fn third_moment_against_matrix_monte_carlo() {
    let cfg = SimConfig::new(256, 1, 0.5, 0.005, 6, 17);
    let ens = simulate_paths(&cfg).unwrap();
    let u = Letter::u(1, Time::from_secs(0.5));
    let e = eval_trace_estimate(&Word::new([u, u, u]), &ens).unwrap();
    let m = ubm_moment(3, 0.5).unwrap();
    assert!((e.mean.re - m).abs() <= 3.0 * e.stderr, "{e:?} vs {m}");
}

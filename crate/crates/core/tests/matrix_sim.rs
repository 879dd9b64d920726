use std::collections::BTreeSet;

use liblab::cond_expect::{cond_expect_past, projected_gradient};
use liblab::matrix_sim::linalg::{adjoint, frobenius, hermitian_eigenvalues, identity, mm};
use liblab::matrix_sim::{eval_trace_poly_scalar, liberation_snapshot, read_paths, simulate_paths, write_paths, SimConfig, TraceEstimate};
use liblab::nc_algebra::{parse_poly, pi_t, Time};

fn secs(t: f64) -> Time {
    Time::from_secs(t)
}

fn stored_bytes(cfg: &SimConfig, threads: usize) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let ens = pool.install(|| simulate_paths(cfg)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.bin");
    write_paths(&path, &ens).unwrap();
    std::fs::read(path).unwrap()
}

#[test]
fn seed_determinism_and_worker_independence() {
    let cfg = SimConfig::new(6, 2, 0.2, 0.02, 5, 11).with_snapshots(&[0.1, 0.2]);
    let a = stored_bytes(&cfg, 1);
    assert_eq!(a, stored_bytes(&cfg, 3));
    let mut other = cfg.clone();
    other.seed = 12;
    assert_ne!(a, stored_bytes(&other, 1));
}

#[test]
fn drifted_runs_are_worker_independent() {
    let c = parse_poly("0.3*x(1)*u(1,0.2) + 0.3*u*(1,0.2)*x(1)").unwrap();
    let cfg = SimConfig::new(4, 1, 0.2, 0.02, 4, 5).with_snapshots(&[0.2]).with_drift(&c);
    assert_eq!(stored_bytes(&cfg, 1), stored_bytes(&cfg, 2));
}

#[test]
fn snapshots_are_unitary() {
    let cfg = SimConfig::new(16, 2, 1.0, 0.01, 3, 3).with_snapshots(&[0.25, 0.5, 1.0]);
    let ens = simulate_paths(&cfg).unwrap();
    let id = identity(16);
    for s in &ens.samples {
        for comp in &s.u {
            for u in comp.values() {
                let dev = frobenius((&mm(adjoint(u.as_ref()).as_ref(), u.as_ref()) - &id).as_ref());
                assert!(dev < 1e-10, "{dev}");
            }
        }
    }
}

#[test]
fn liberation_preserves_the_spectrum() {
    let mut cfg = SimConfig::new(12, 2, 0.5, 0.05, 2, 9).with_snapshots(&[0.5]);
    cfg.x_families = 2;
    let ens = simulate_paths(&cfg).unwrap();
    for s in 0..ens.len() {
        let v = ens.view(s);
        for i in 1..=2 {
            for j in 1..=2 {
                let x = ens.x.get(i, j).unwrap();
                let lib = liberation_snapshot(&v, secs(0.5), i, j).unwrap();
                let a = hermitian_eigenvalues(x.as_ref()).unwrap();
                let b = hermitian_eigenvalues(lib.as_ref()).unwrap();
                for (p, q) in a.iter().zip(&b) {
                    assert!((p - q).abs() < 1e-10);
                }
                assert!(frobenius((&lib - &adjoint(lib.as_ref())).as_ref()) < 1e-10);
            }
        }
    }
}

#[test]
fn store_round_trip() {
    let mut cfg = SimConfig::new(5, 2, 0.3, 0.05, 3, 4).with_snapshots(&[0.1, 0.3]);
    cfg.record_b = true;
    let ens = simulate_paths(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.bin");
    write_paths(&path, &ens).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"LIBLAB1"));
    let back = read_paths(&path).unwrap();
    assert_eq!(back.config, ens.config);
    assert_eq!(back.config_hash, ens.config_hash);
    for (p, q) in back.samples.iter().zip(&ens.samples) {
        assert_eq!(p.u, q.u);
    }
    std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
    assert!(read_paths(&path).is_err());
}

/// Over `[t0, t1]` the mean change of `tr E⁰[a | F_t]` in the drifted run
/// matches the integral of `Σ_i tr(g_i(a, s) ξ_i(s))`.
#[test]
fn clark_ocone_drift_consistency() {
    let c = parse_poly("x(1)*u(1,0.5) + u*(1,0.5)*x(1)").unwrap();
    let a = parse_poly("u(1,0.5) + u*(1,0.5)").unwrap();
    let (t0, t1, h) = (0.2, 0.3, 0.02);
    let grid: Vec<Time> = (0..=5).map(|k| secs(t0 + h * k as f64)).collect();
    let snaps: BTreeSet<Time> = grid.iter().copied().chain([secs(0.5)]).collect();
    let cfg = SimConfig::new(32, 1, 0.5, 0.005, 128, 21).with_snapshot_times(snaps).with_drift(&c);
    let ens = simulate_paths(&cfg).unwrap();

    let cond = |t: Time| cond_expect_past(&pi_t(t, &a), t).unwrap();
    let (e0, e1) = (cond(secs(t0)), cond(secs(t1)));
    let pair: Vec<_> = grid
        .iter()
        .map(|&s| projected_gradient(&a, 1, s).unwrap().multiply(&projected_gradient(&c, 1, s).unwrap()))
        .collect();
    let rows = ens
        .per_sample(|v| {
            let lhs = eval_trace_poly_scalar(v, &e1)?.re - eval_trace_poly_scalar(v, &e0)?.re;
            let f: Vec<f64> = pair.iter().map(|p| eval_trace_poly_scalar(v, &p.trace()).map(|z| z.re)).collect::<Result<_, _>>()?;
            let rhs: f64 = f.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum();
            Ok(lhs - rhs)
        })
        .unwrap();
    let diff = TraceEstimate::from_real(&rows);
    assert!(diff.mean.re.abs() <= 3.0 * diff.stderr, "{diff:?}");

    // The drift term is visible above the noise, so the comparison has teeth.
    let rhs_only: Vec<f64> = ens
        .per_sample(|v| {
            let f: Vec<f64> = pair.iter().map(|p| eval_trace_poly_scalar(v, &p.trace()).map(|z| z.re)).collect::<Result<_, _>>()?;
            Ok(f.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum())
        })
        .unwrap();
    let rhs = TraceEstimate::from_real(&rhs_only);
    assert!(rhs.mean.re.abs() > 4.0 * diff.stderr, "{rhs:?} vs {diff:?}");
}

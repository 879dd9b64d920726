//! Random streams and Hermitian Brownian increments.

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::linalg::CMat;

/// Stream domains keep path noise and inner conditional-expectation noise
/// disjoint for the same seed.
pub const DOMAIN_PATH: u64 = 0;
pub const DOMAIN_INNER: u64 = 1;

/// Counter-based stream for `(seed, domain, stream)`.
pub fn stream_rng(seed: u64, domain: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(stream);
    rng
}

/// Stream index for one component of one sample.
pub fn path_stream(sample: usize, component: usize) -> u64 {
    ((sample as u64) << 16) | component as u64
}

/// Hermitian increment with `E[Tr(ΔH²)] = N·dt`: diagonal entries
/// `N(0, dt/N)`, off-diagonal real and imaginary parts `N(0, dt/2N)`.
pub fn sample_hermitian_increment<R: Rng + ?Sized>(n: usize, dt: f64, rng: &mut R) -> CMat {
    let sd_diag = (dt / n as f64).sqrt();
    let sd_off = (dt / (2.0 * n as f64)).sqrt();
    let mut h = Mat::zeros(n, n);
    for j in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        h[(j, j)] = C64::new(sd_diag * d, 0.0);
        for i in j + 1..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = C64::new(sd_off * re, sd_off * im);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_sim::linalg::{mm, ntrace};

    #[test]
    fn hermitian_and_reproducible() {
        let a = sample_hermitian_increment(6, 0.1, &mut stream_rng(3, DOMAIN_PATH, 5));
        let b = sample_hermitian_increment(6, 0.1, &mut stream_rng(3, DOMAIN_PATH, 5));
        let c = sample_hermitian_increment(6, 0.1, &mut stream_rng(3, DOMAIN_PATH, 6));
        assert_eq!(a, b);
        assert_ne!(a, c);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(a[(i, j)], a[(j, i)].conj());
            }
        }
    }

    #[test]
    fn normalization() {
        let (n, dt, reps) = (16, 1e-3, 2000);
        let mut rng = stream_rng(11, DOMAIN_PATH, 0);
        let vals: Vec<f64> = (0..reps)
            .map(|_| {
                let h = sample_hermitian_increment(n, dt, &mut rng);
                ntrace(mm(h.as_ref(), h.as_ref()).as_ref()).re / dt
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        assert!((mean - 1.0).abs() < 3.0 * (var / reps as f64).sqrt() + 1e-3, "{mean}");
    }
}

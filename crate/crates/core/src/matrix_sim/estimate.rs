//! Ensemble means with standard errors, reduced in a fixed pairwise order.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Pairwise sum with a fixed split, independent of thread count.
pub fn pairwise_sum<T: Copy + std::ops::Add<Output = T>>(xs: &[T], zero: T) -> T {
    match xs.len() {
        0 => zero,
        1 => xs[0],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a, zero) + pairwise_sum(b, zero)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEstimate {
    pub mean: C64,
    pub stderr: f64,
    pub samples: usize,
}

impl TraceEstimate {
    /// Mean and standard error `sqrt(Σ|z − mean|² / (S(S−1)))`.
    pub fn from_values(values: &[C64]) -> Self {
        let s = values.len();
        if s == 0 {
            return TraceEstimate { mean: C64::new(f64::NAN, f64::NAN), stderr: f64::INFINITY, samples: 0 };
        }
        let mean = pairwise_sum(values, C64::new(0.0, 0.0)) / s as f64;
        let stderr = if s > 1 {
            let dev: Vec<f64> = values.iter().map(|v| (v - mean).norm_sqr()).collect();
            (pairwise_sum(&dev, 0.0) / ((s - 1) * s) as f64).sqrt()
        } else {
            f64::INFINITY
        };
        TraceEstimate { mean, stderr, samples: s }
    }

    pub fn from_real(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_values(&v)
    }
}

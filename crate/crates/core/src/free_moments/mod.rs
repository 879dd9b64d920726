//! Free unitary Brownian motion moments and the semicircle law.

mod semicircle;
mod ubm;

pub use semicircle::{burgers_residual, semicircle_cauchy, semicircle_density, semicircle_moment};
pub use ubm::{ubm_moment, ubm_moment_at};

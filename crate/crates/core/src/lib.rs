//! Symbolic and Monte Carlo laboratory for unitary Brownian motion, the
//! liberation process and the noncommutative calculus around them.
//!
//! * [`nc_algebra`]: words, polynomials, derivations, time shifts.
//! * [`free_moments`]: free unitary Brownian motion moments, semicircle law.
//! * [`cond_expect`]: conditional expectation onto the past as trace polynomials.
//! * [`matrix_sim`]: finite-N unitary Brownian motion ensembles.
//! * [`rate_and_checks`]: rate functional, Girsanov exponent, tracial metric, check battery.
//! * [`cli_report`]: run configuration and report emission.

pub mod cond_expect;
pub mod error;
pub mod free_moments;
pub mod matrix_sim;
pub mod nc_algebra;
pub mod rate_and_checks;
pub mod cli_report;

pub use error::{LabError, Result};

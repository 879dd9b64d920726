//! Conditional expectation onto the past algebra, producing trace
//! polynomials.

mod gradient;
mod mc;
mod past;
mod trace_poly;
mod ubm_word;

pub use gradient::{projected_gradient, projected_gradient_lib, projected_gradient_right_with, projected_gradient_with};
pub use mc::mc_cond_expect;
pub use past::{cond_expect_past, CondExpect, FREE_LETTER_CAP};
pub use trace_poly::{TracePoly, TraceSymbols};
pub use ubm_word::ubm_word_moment;

//! Finite-N realization: Hermitian Brownian increments, unitary Brownian
//! motion, liberation snapshots, word traces and the stochastic integral `b`.

mod config;
mod ensemble;
mod estimate;
mod eval;
mod expm;
mod gradients;
pub mod linalg;
mod path;
mod rng;
mod store;
mod xmats;

pub use config::{Drift, DriftMode, Scheme, SimConfig, XSpec};
pub use ensemble::{eval_trace_estimate, simulate_paths, simulate_with, stochastic_integral_b, SampleView, UnitaryPathEnsemble};
pub use estimate::{pairwise_sum, TraceEstimate};
pub use eval::{eval_trace_poly, eval_trace_poly_scalar, eval_word, eval_word_trace, EvalCache, liberation_snapshot, resolvent_trace, MatrixSource, StaticSource};
pub use expm::{expm, expm_params};
pub use gradients::{letter_times, GradientTable};
pub use linalg::CMat;
pub use path::{propagator, simulate_sample, DriftEngine, PathSample, PathState, Shared, StepContext, StepObserver, DRIFT_SYMMETRY_TOL};
pub use rng::{path_stream, sample_hermitian_increment, stream_rng, DOMAIN_INNER, DOMAIN_PATH};
pub use store::{read_paths, write_paths, MAGIC};
pub use xmats::XMatrices;

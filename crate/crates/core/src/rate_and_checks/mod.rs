//! Rate functional, Girsanov exponent, tracial metric and the named check
//! battery.

pub mod checks;
pub mod distance;
pub mod girsanov;
pub mod oracle;
pub mod rate;
pub mod report;

pub use checks::{check_suite, resolve_names, CheckSettings, CHECK_NAMES};
pub use distance::{tracial_distance, tracial_distance_with_band, CorpusSpec, DistanceEstimate};
pub use girsanov::{girsanov_exponent, GirsanovObserver, GirsanovTables};
pub use oracle::{EmpiricalOracle, LiftedOracle, Sigma0Frbm, TableOracle, TraceOracle, XMatrixOracle};
pub use rate::{letter_times_of, potential_bound, rate_of_potential, rate_of_potential_in, rate_term, uniform_grid, Alphabet, DriftSpec};
pub use report::{CheckReport, Histogram};

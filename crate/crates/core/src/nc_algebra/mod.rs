//! Word algebra over the letters `x`, `x^lib`, `u`, `ũ`, `v` with unitarity
//! reduction, the derivations `δ_{t,i}`/`𝔇_{t,i}`, the sharp action, `Π^t`
//! and the lift from the liberation alphabet.

mod derivation;
mod parse;
mod poly;
mod shift;
mod time;
mod word;

pub use derivation::{d_lib, d_u, d_u_closed_form, delta_lib, delta_u};
pub use parse::parse_poly;
pub use poly::{sharp_apply, theta, NCPoly, TensorNCPoly, SYMBOLIC_REL_TOL};
pub(crate) use poly::{add_coeff, fmt_complex, maps_approx_eq};
pub use shift::{lift_u, pi_t, y_coord, y_inv};
pub use time::{Time, TICK};
pub use word::{Kind, Letter, Word};

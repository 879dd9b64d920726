//! Time-shift homomorphism `Π^t`, the lift `a ↦ ᵘa` from the liberation
//! alphabet, and the `y` coordinates.

use num_complex::Complex64 as C64;

use super::poly::NCPoly;
use super::time::Time;
use super::word::{Letter, Word};

fn pi_t_letter(t: Time, l: &Letter) -> NCPoly {
    match *l {
        Letter::U { i, t: t2, star } => {
            // u_i(t') ↦ ũ_i((t'−t)∨0) u_i(t∧t')
            let w = Word::new([Letter::ut(i, t2.saturating_sub(t)), Letter::u(i, t.min(t2))]);
            NCPoly::from(if star { w.adjoint() } else { w })
        }
        Letter::XL { i, j, t: t2 } => {
            // x_ij(t') ↦ v_i((t'−t)∨0) x_ij(t∧t') v_i((t'−t)∨0)*
            let v = Letter::v(i, t2.saturating_sub(t));
            NCPoly::word([v, Letter::xl(i, j, t.min(t2)), v.adjoint()])
        }
        other => NCPoly::letter(other),
    }
}

/// `Π^t`, a unital *-homomorphism fixing `X`, `ũ` and `v` letters.
pub fn pi_t(t: Time, p: &NCPoly) -> NCPoly {
    p.substitute(|l| pi_t_letter(t, l))
}

/// The lift `ᵘ`: `x_ij(t) ↦ u_i(t) x_{(i,j)} u_i(t)*`, `v_i ↦ ũ_i`; static
/// letters `X` (including the `n+1` family) are fixed.
pub fn lift_u(p: &NCPoly) -> NCPoly {
    p.substitute(|l| match *l {
        Letter::XL { i, j, t } => NCPoly::word([Letter::u(i, t), Letter::x_family(i, j), Letter::u_star(i, t)]),
        Letter::V { i, t, star } => NCPoly::letter(Letter::UT { i, t, star }),
        other => NCPoly::letter(other),
    })
}

/// `y_i(t) = e^{t/2} u_i(t)`.
pub fn y_coord(i: u32, t: Time) -> NCPoly {
    NCPoly::from_word(Word::letter(Letter::u(i, t)), C64::new((t.secs() / 2.0).exp(), 0.0))
}

/// `y_i(t)^{-1} = e^{-t/2} u_i(t)*`.
pub fn y_inv(i: u32, t: Time) -> NCPoly {
    NCPoly::from_word(Word::letter(Letter::u_star(i, t)), C64::new((-t.secs() / 2.0).exp(), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tm(s: f64) -> Time {
        Time::from_secs(s)
    }

    #[test]
    fn pi_t_on_past_letter_is_identity() {
        let p = NCPoly::letter(Letter::u(1, 0.4));
        assert_eq!(pi_t(tm(0.5), &p), p);
        assert_eq!(pi_t(tm(0.4), &p), p);
    }

    #[test]
    fn pi_t_on_future_letter() {
        let p = NCPoly::letter(Letter::u(1, 2.0));
        assert_eq!(pi_t(tm(1.0), &p), NCPoly::word([Letter::ut(1, 1.0), Letter::u(1, 1.0)]));
        let q = NCPoly::letter(Letter::u_star(1, 2.0));
        assert_eq!(pi_t(tm(1.0), &q), NCPoly::word([Letter::u_star(1, 1.0), Letter::ut_star(1, 1.0)]));
    }

    #[test]
    fn pi_t_liberation_rule() {
        let p = NCPoly::letter(Letter::xl(2, 1, 0.9));
        let e = NCPoly::word([Letter::v(2, 0.4), Letter::xl(2, 1, 0.5), Letter::v_star(2, 0.4)]);
        assert_eq!(pi_t(tm(0.5), &p), e);
    }

    #[test]
    fn lift_examples() {
        let p = NCPoly::letter(Letter::xl(1, 3, 0.5));
        let e = NCPoly::word([Letter::u(1, 0.5), Letter::x_family(1, 3), Letter::u_star(1, 0.5)]);
        assert_eq!(lift_u(&p), e);
        let s = NCPoly::letter(Letter::x_family(3, 1));
        assert_eq!(lift_u(&s), s);
        assert_eq!(lift_u(&NCPoly::letter(Letter::v_star(1, 0.2))), NCPoly::letter(Letter::ut_star(1, 0.2)));
    }

    #[test]
    fn y_coordinates() {
        assert_eq!(y_coord(1, Time::ZERO), NCPoly::letter(Letter::u(1, 0.0)));
        let prod = y_coord(1, tm(2.0)) * y_inv(1, tm(2.0));
        assert!(prod.approx_eq(&NCPoly::one(), 1e-15));
        let adj = y_coord(2, tm(1.0)).adjoint();
        assert_eq!(adj, NCPoly::from_word(Word::letter(Letter::u_star(2, 1.0)), C64::new(0.5_f64.exp(), 0.0)));
    }
}

//! Projected gradients `E_∞(Π^t(𝔇_{t,i} a))` in the unitary and liberation
//! alphabets.

use super::past::CondExpect;
use super::trace_poly::TracePoly;
use crate::error::Result;
use crate::nc_algebra::{d_lib, d_u, pi_t, Letter, NCPoly, Time, Word};

/// `E_∞(Π^t(𝔇_{t,i} a))` for `a` over `x`, `u`.
pub fn projected_gradient(a: &NCPoly, i: u32, t: Time) -> Result<TracePoly> {
    CondExpect::new().poly(&pi_t(t, &d_u(t, i, a)?), t)
}

/// Liberation version: `E_∞(Π^t(𝔇^lib_{t,i} a))` for `a` over `x`, `x^lib`.
pub fn projected_gradient_lib(a: &NCPoly, i: u32, t: Time) -> Result<TracePoly> {
    CondExpect::new().poly(&pi_t(t, &d_lib(t, i, a)?), t)
}

/// Same as [`projected_gradient`] but sharing memo tables across calls.
pub fn projected_gradient_with(ev: &mut CondExpect, a: &NCPoly, i: u32, t: Time, lib: bool) -> Result<TracePoly> {
    let d = if lib { d_lib(t, i, a)? } else { d_u(t, i, a)? };
    ev.poly(&pi_t(t, &d), t)
}

fn retime(l: &Letter, from: Time, to: Time) -> Letter {
    match *l {
        Letter::U { i, t, star } if t == from => Letter::U { i, t: to, star },
        Letter::XL { i, j, t } if t == from => Letter::XL { i, j, t: to },
        other => other,
    }
}

/// Limit from the right at `t` of the projected gradient: letters at time
/// exactly `t` count as past and are no longer differentiated. Away from
/// letter times it equals [`projected_gradient_with`].
pub fn projected_gradient_right_with(ev: &mut CondExpect, a: &NCPoly, i: u32, t: Time, lib: bool) -> Result<TracePoly> {
    if !a.letters().any(|l| l.time() == Some(t)) || t.is_zero() {
        return projected_gradient_with(ev, a, i, t, lib);
    }
    // Letters at t are moved one tick into the past, where the derivation at
    // t ignores them; no coefficient depends on the time of a past letter.
    let shadow = Time::from_ticks(t.ticks() - 1);
    let moved = a.substitute(|l| NCPoly::letter(retime(l, t, shadow)));
    let g = projected_gradient_with(ev, &moved, i, t, lib)?;
    Ok(g.map_letters(|l| Word::letter(retime(l, shadow, t))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nc_algebra::{y_coord, Letter};
    use num_complex::Complex64 as C64;

    #[test]
    fn increment_of_y_coordinate() {
        let (r, s) = (Time::from_secs(0.3), Time::from_secs(0.8));
        let a = NCPoly::word([Letter::x(1), Letter::u(1, 0.1)]);
        let p = (y_coord(1, s) - y_coord(1, r)) * a.clone();
        for &tt in &[0.2, 0.3, 0.31, 0.5, 0.8, 0.81, 1.2] {
            let t = Time::from_secs(tt);
            let got = projected_gradient(&p, 1, t).unwrap();
            let expected = if r < t && t <= s {
                TracePoly::from((&y_coord(1, t) * &a).scale(C64::new(0.0, 1.0)))
            } else {
                TracePoly::zero()
            };
            assert!(got.approx_eq(&expected, 1e-12), "t={tt}: {got}");
            assert!(projected_gradient(&p, 2, t).unwrap().is_zero());
        }
    }

    #[test]
    fn right_limit_drops_current_letters() {
        let a = NCPoly::word([Letter::x(1), Letter::u(1, 0.5)]) + NCPoly::word([Letter::u_star(1, 0.5), Letter::x(1)]);
        let t = Time::from_secs(0.5);
        assert!(!projected_gradient(&a, 1, t).unwrap().is_zero());
        assert!(projected_gradient_right_with(&mut CondExpect::new(), &a, 1, t, false).unwrap().is_zero());
        let b = a.clone() * NCPoly::letter(Letter::u(1, 0.8));
        let right = projected_gradient_right_with(&mut CondExpect::new(), &b, 1, t, false).unwrap();
        let shifted = Time::from_secs(0.5 + 1e-6);
        let later = projected_gradient(&b, 1, shifted).unwrap().map_letters(|l| Word::letter(retime(l, shifted, t)));
        assert!(right.approx_eq(&later, 1e-5), "{right} vs {later}");
    }

    #[test]
    fn vanishes_after_last_time() {
        let a = NCPoly::word([Letter::u(1, 0.2), Letter::x(1), Letter::u_star(1, 0.4)]);
        assert!(projected_gradient(&a, 1, Time::from_secs(0.5)).unwrap().is_zero());
    }
}

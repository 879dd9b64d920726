//! The derivations `δ_{t,i}` and cyclic gradients `𝔇_{t,i} = θ∘δ_{t,i}` for
//! the unitary alphabet and the liberation alphabet.

use num_complex::Complex64 as C64;

use super::poly::{theta, NCPoly, TensorNCPoly};
use super::time::Time;
use super::word::{Letter, Word};
use crate::error::{LabError, Result};

const I: C64 = C64::new(0.0, 1.0);

/// `δ_{t,i}` of one letter as a tensor `a ⊗ b`, or `None` when it vanishes.
fn delta_u_letter(t: Time, i: u32, l: &Letter) -> Result<Option<(Word, Word, C64)>> {
    match *l {
        Letter::X { .. } => Ok(None),
        Letter::U { i: i2, t: t2, star } => {
            if i2 != i || t > t2 {
                return Ok(None);
            }
            let ut = Letter::u(i, t);
            if !star {
                // (u(t') ⊗ 1)(i u(t)* ⊗ u(t))
                Ok(Some((Word::new([Letter::u(i, t2), ut.adjoint()]), Word::letter(ut), I)))
            } else {
                // (-i u(t)* ⊗ u(t))(1 ⊗ u(t')*)
                Ok(Some((Word::letter(ut.adjoint()), Word::new([ut, Letter::u_star(i, t2)]), -I)))
            }
        }
        other => Err(LabError::UnexpectedLetter { op: "delta_u", letter: other }),
    }
}

fn delta_lib_letter(t: Time, i: u32, l: &Letter) -> Result<Vec<(Word, Word, C64)>> {
    match *l {
        Letter::X { .. } => Ok(vec![]),
        Letter::XL { i: i2, j, t: t2 } => {
            if i2 != i || t > t2 {
                return Ok(vec![]);
            }
            let v = Letter::v(i, t2 - t);
            let x = Letter::xl(i, j, t2);
            // x v ⊗ v*  −  v ⊗ v* x
            Ok(vec![
                (Word::new([x, v]), Word::letter(v.adjoint()), C64::new(1.0, 0.0)),
                (Word::letter(v), Word::new([v.adjoint(), x]), C64::new(-1.0, 0.0)),
            ])
        }
        other => Err(LabError::UnexpectedLetter { op: "delta_lib", letter: other }),
    }
}

/// Extends a letter rule by the Leibniz rule
/// `δ(ab) = δ(a)(1⊗b) + (a⊗1)δ(b)`.
fn leibniz(p: &NCPoly, rule: impl Fn(&Letter) -> Result<Vec<(Word, Word, C64)>>) -> Result<TensorNCPoly> {
    let mut out = TensorNCPoly::zero();
    for (w, c) in p.terms() {
        let ls = w.letters();
        for (k, l) in ls.iter().enumerate() {
            for (a, b, d) in rule(l)? {
                let left = Word::new(ls[..k].iter().copied()).concat(&a);
                let right = b.concat(&Word::new(ls[k + 1..].iter().copied()));
                out.add_term(left, right, c * d);
            }
        }
    }
    Ok(out)
}

/// `δ_{t,i} p` over the `{X, U}` alphabet.
pub fn delta_u(t: Time, i: u32, p: &NCPoly) -> Result<TensorNCPoly> {
    leibniz(p, |l| Ok(delta_u_letter(t, i, l)?.into_iter().collect()))
}

/// `𝔇_{t,i} p = θ(δ_{t,i} p)`.
pub fn d_u(t: Time, i: u32, p: &NCPoly) -> Result<NCPoly> {
    Ok(theta(&delta_u(t, i, p)?))
}

/// The same gradient written out as an explicit sum over occurrences of
/// `u_i(t')` and `u_i(t')*` with `t ≤ t'`:
///
/// `i·Σ u(t) w₂ w₁ u(t') u(t)*  −  i·Σ u(t) u(t')* w₂ w₁ u(t)*`.
///
/// Built without `δ` or `θ` so the two can be compared.
pub fn d_u_closed_form(t: Time, i: u32, p: &NCPoly) -> Result<NCPoly> {
    let mut out = NCPoly::zero();
    for (w, c) in p.terms() {
        let ls = w.letters();
        for (k, l) in ls.iter().enumerate() {
            let (t2, star) = match *l {
                Letter::X { .. } => continue,
                Letter::U { i: i2, t: t2, star } if i2 == i && t <= t2 => (t2, star),
                Letter::U { .. } => continue,
                other => return Err(LabError::UnexpectedLetter { op: "d_u_closed_form", letter: other }),
            };
            let mut letters = vec![Letter::u(i, t)];
            if star {
                letters.push(Letter::u_star(i, t2));
            }
            letters.extend_from_slice(&ls[k + 1..]);
            letters.extend_from_slice(&ls[..k]);
            if !star {
                letters.push(Letter::u(i, t2));
            }
            letters.push(Letter::u_star(i, t));
            out.add_term(Word::new(letters), if star { -I * c } else { I * c });
        }
    }
    Ok(out)
}

/// Liberation derivation `δ_{t,i}` over the `{XL}` alphabet (plus static
/// `X` letters, which it annihilates).
pub fn delta_lib(t: Time, i: u32, p: &NCPoly) -> Result<TensorNCPoly> {
    leibniz(p, |l| delta_lib_letter(t, i, l))
}

/// `𝔇_{t,i} = θ∘δ_{t,i}` for the liberation alphabet.
pub fn d_lib(t: Time, i: u32, p: &NCPoly) -> Result<NCPoly> {
    Ok(theta(&delta_lib(t, i, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tm(s: f64) -> Time {
        Time::from_secs(s)
    }

    #[test]
    fn x_letters_are_constants() {
        assert!(delta_u(tm(0.3), 1, &NCPoly::letter(Letter::x(2))).unwrap().is_zero());
    }

    #[test]
    fn generator_rule_for_u() {
        let d = delta_u(tm(0.3), 1, &NCPoly::letter(Letter::u(1, 0.8))).unwrap();
        let expected = TensorNCPoly::simple(
            Word::new([Letter::u(1, 0.8), Letter::u_star(1, 0.3)]),
            Word::letter(Letter::u(1, 0.3)),
            I,
        );
        assert_eq!(d, expected);
    }

    #[test]
    fn other_index_and_past_letters_vanish() {
        assert!(delta_u(tm(0.3), 1, &NCPoly::letter(Letter::u(2, 0.8))).unwrap().is_zero());
        assert!(delta_u(tm(0.9), 1, &NCPoly::letter(Letter::u(1, 0.8))).unwrap().is_zero());
    }

    #[test]
    fn gradient_of_single_letters() {
        let t = tm(0.2);
        let d = d_u(t, 1, &NCPoly::letter(Letter::u(1, 0.7))).unwrap();
        let e = NCPoly::from_word(Word::new([Letter::u(1, 0.2), Letter::u(1, 0.7), Letter::u_star(1, 0.2)]), I);
        assert_eq!(d, e);
        let d = d_u(t, 1, &NCPoly::letter(Letter::u_star(1, 0.7))).unwrap();
        let e = NCPoly::from_word(Word::new([Letter::u(1, 0.2), Letter::u_star(1, 0.7), Letter::u_star(1, 0.2)]), -I);
        assert_eq!(d, e);
    }

    #[test]
    fn gradient_at_equal_time_collapses() {
        // u(t) u(t) u(t)* = u(t)
        let d = d_u(tm(0.5), 1, &NCPoly::letter(Letter::u(1, 0.5))).unwrap();
        assert_eq!(d, NCPoly::from_word(Word::letter(Letter::u(1, 0.5)), I));
    }

    #[test]
    fn rejects_free_family_letters() {
        assert!(delta_u(tm(0.1), 1, &NCPoly::letter(Letter::ut(1, 0.5))).is_err());
        assert!(delta_lib(tm(0.1), 1, &NCPoly::letter(Letter::u(1, 0.5))).is_err());
    }

    #[test]
    fn liberation_rule_and_vanishing() {
        let t = tm(0.2);
        assert!(delta_lib(t, 1, &NCPoly::letter(Letter::xl(2, 1, 0.7))).unwrap().is_zero());
        assert!(delta_lib(tm(0.9), 1, &NCPoly::letter(Letter::xl(1, 1, 0.7))).unwrap().is_zero());
        // θ of the single-letter rule: v* x v − v* x v = 0.
        assert!(d_lib(t, 1, &NCPoly::letter(Letter::xl(1, 1, 0.7))).unwrap().is_zero());
    }

    #[test]
    fn liberation_gradient_two_letter_golden() {
        // Worked by hand: for w = x(t') a with a a past letter,
        // 𝔇 w = v* a x v − v* x a v, v = v_1(t'−t).
        let t = tm(0.2);
        let x = Letter::xl(1, 1, 0.7);
        let a = Letter::x_family(2, 1);
        let v = Letter::v(1, 0.5);
        let d = d_lib(t, 1, &NCPoly::word([x, a])).unwrap();
        let e = NCPoly::word([v.adjoint(), a, x, v]) - NCPoly::word([v.adjoint(), x, a, v]);
        assert_eq!(d, e);
    }
}

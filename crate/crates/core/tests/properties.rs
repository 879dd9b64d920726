//! Algebraic invariants over random corpora.

mod common;

use common::*;
use liblab::cond_expect::{cond_expect_past, projected_gradient};
use liblab::nc_algebra::{d_u, d_u_closed_form, delta_lib, delta_u, lift_u, pi_t, Letter, NCPoly, Time, Word};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn past_poly(t: Time) -> impl Strategy<Value = NCPoly> {
    u_poly(2, 2).prop_map(move |p| {
        let mut q = NCPoly::zero();
        for (w, c) in p.terms() {
            if w.max_time().is_none_or(|s| s <= t) {
                q.add_term(w.clone(), *c);
            }
        }
        q
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn leibniz_unitary(a in u_poly(3, 4), b in u_poly(3, 4), t in cut(), i in 1..=3u32) {
        let lhs = delta_u(t, i, &(&a * &b)).unwrap();
        let rhs = delta_u(t, i, &a).unwrap().right_mul(&b) + delta_u(t, i, &b).unwrap().left_mul(&a);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn leibniz_liberation(a in lib_poly(3, 3), b in lib_poly(3, 3), t in cut(), i in 1..=3u32) {
        let lhs = delta_lib(t, i, &(&a * &b)).unwrap();
        let rhs = delta_lib(t, i, &a).unwrap().right_mul(&b) + delta_lib(t, i, &b).unwrap().left_mul(&a);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn closed_form_gradient_matches_theta_delta(w in word_of(u_letter(2), 8), t in cut(), i in 1..=2u32) {
        let p = NCPoly::from(w);
        prop_assert_eq!(d_u(t, i, &p).unwrap(), d_u_closed_form(t, i, &p).unwrap());
    }

    #[test]
    fn pi_t_is_a_star_homomorphism(a in u_poly(2, 4), b in lib_poly(2, 3), t in cut()) {
        prop_assert_eq!(pi_t(t, &(&a * &b)), &pi_t(t, &a) * &pi_t(t, &b));
        prop_assert_eq!(pi_t(t, &a.adjoint()), pi_t(t, &a).adjoint());
        prop_assert_eq!(pi_t(t, &b.adjoint()), pi_t(t, &b).adjoint());
    }

    #[test]
    fn pi_t_fixes_the_past(a in u_poly(2, 4), t in cut()) {
        let t = a.max_time().map_or(t, |s| s.max(t));
        prop_assert_eq!(pi_t(t, &a), a);
    }

    #[test]
    fn lift_is_a_star_homomorphism(a in lib_poly(3, 3), b in lib_poly(3, 3)) {
        prop_assert_eq!(lift_u(&(&a * &b)), &lift_u(&a) * &lift_u(&b));
        prop_assert_eq!(lift_u(&a.adjoint()), lift_u(&a).adjoint());
    }

    #[test]
    fn adjoint_is_an_involution(a in u_poly(3, 5), b in u_poly(3, 5), c in coef()) {
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        prop_assert_eq!((&a * &b).adjoint(), &b.adjoint() * &a.adjoint());
        prop_assert_eq!(a.scale(c).adjoint(), a.adjoint().scale(c.conj()));
    }

    #[test]
    fn multiplication_is_associative(a in u_poly(2, 3), b in u_poly(2, 3), c in u_poly(2, 3)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn cond_expect_is_a_past_bimodule_map(
        a in u_poly(2, 3),
        t in prop::sample::select(vec![0.3, 0.5]).prop_map(Time::from_secs),
        l in past_poly(Time::from_secs(0.3)),
        r in past_poly(Time::from_secs(0.3)),
    ) {
        let xi = pi_t(t, &a);
        let whole = cond_expect_past(&(&(&l * &xi) * &r), t).unwrap();
        let split = cond_expect_past(&xi, t).unwrap().mul_poly_left(&l).mul_poly_right(&r);
        prop_assert!(whole.approx_eq(&split, 1e-12), "{whole:?} vs {split:?}");
    }

    #[test]
    fn gradient_of_a_self_adjoint_poly_is_self_adjoint(a in u_poly(2, 3), t in cut(), i in 1..=2u32) {
        let sa = a.clone() + a.adjoint();
        let g = projected_gradient(&sa, i, t).unwrap();
        prop_assert!(g.approx_eq(&g.adjoint(), 1e-12));
    }

    #[test]
    fn gradient_vanishes_beyond_last_time(a in u_poly(2, 4), i in 1..=2u32) {
        let last = a.max_time().unwrap_or(Time::ZERO);
        let t = last + Time::from_secs(0.1);
        prop_assert!(projected_gradient(&a, i, t).unwrap().is_zero());
    }
}

#[test]
fn unit_and_unitarity() {
    let u = NCPoly::letter(Letter::u(1, Time::from_secs(0.5)));
    assert_eq!(&u * &u.adjoint(), NCPoly::one());
    assert_eq!(NCPoly::from(Word::empty()), NCPoly::one());
    assert_eq!(NCPoly::one().scale(C64::new(2.0, 0.0)) * u.clone(), u.scale(C64::new(2.0, 0.0)));
}

//! Exact checks on the symbolic side.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::CheckSettings;
use crate::cond_expect::{projected_gradient, projected_gradient_lib, CondExpect, TracePoly};
use crate::error::Result;
use crate::matrix_sim::{simulate_paths, SimConfig};
use crate::nc_algebra::{d_lib, d_u, lift_u, pi_t, y_coord, Letter, NCPoly, Time, Word};
use crate::rate_and_checks::oracle::{EmpiricalOracle, LiftedOracle};
use crate::rate_and_checks::rate::{energy_density, letter_times_of, rate_of_potential, rate_of_potential_in, uniform_grid, Alphabet};
use crate::rate_and_checks::report::CheckReport;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn rng(settings: &CheckSettings, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(settings.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    xs[rng.random_range(0..xs.len())]
}

fn secs(xs: &[f64]) -> Vec<Time> {
    xs.iter().map(|&s| Time::from_secs(s)).collect()
}

/// Largest coefficient magnitude of `a − b`.
pub fn max_deviation(a: &TracePoly, b: &TracePoly) -> f64 {
    (a.clone() - b.clone()).terms().map(|(_, _, c)| c.norm()).fold(0.0, f64::max)
}

fn scale_of(a: &TracePoly) -> f64 {
    a.terms().map(|(_, _, c)| c.norm()).fold(1.0, f64::max)
}

fn lift_tp(g: &TracePoly) -> TracePoly {
    g.map_letters(|l| match *l {
        Letter::XL { i, j, t } => Word::new([Letter::u(i, t), Letter::x_family(i, j), Letter::u_star(i, t)]),
        Letter::V { i, t, star } => Word::letter(Letter::UT { i, t, star }),
        other => Word::letter(other),
    })
}

fn random_lib_word(rng: &mut ChaCha8Rng, n: u32, times: &[Time], max_len: usize) -> Word {
    let len = rng.random_range(1..=max_len);
    Word::new((0..len).map(|_| {
        let j = rng.random_range(1..=2);
        if rng.random_bool(0.15) {
            Letter::x_family(n + 1, j)
        } else {
            Letter::xl(rng.random_range(1..=n), j, pick(rng, times))
        }
    }))
}

fn random_u_word(rng: &mut ChaCha8Rng, n: u32, times: &[Time], max_len: usize) -> Word {
    let len = rng.random_range(0..=max_len);
    Word::new((0..len).map(|_| match rng.random_range(0..3) {
        0 => Letter::x(rng.random_range(1..=2)),
        1 => Letter::u(rng.random_range(1..=n), pick(rng, times)),
        _ => Letter::u_star(rng.random_range(1..=n), pick(rng, times)),
    }))
}

fn random_coef(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// `ᵘΠ^t(ᵘ𝔇_{t,i}(ᵘa)) = −i·ᵘ(Π^t(𝔇_{t,i} a))` on random liberation words.
pub fn lemma6_1_intertwine(settings: &CheckSettings) -> Result<Vec<CheckReport>> {
    let mut rng = rng(settings, 61);
    let times = secs(&[0.0, 0.3, 0.7, 1.0]);
    let cuts = secs(&[0.2, 0.5, 1.0]);
    let mut mismatches = 0usize;
    let mut worst = 0.0f64;
    for _ in 0..settings.cases {
        let n = rng.random_range(1..=3);
        let a = NCPoly::from(random_lib_word(&mut rng, n, &times, 6));
        let t = pick(&mut rng, &cuts);
        let i = rng.random_range(1..=n);
        let lhs = pi_t(t, &d_u(t, i, &lift_u(&a))?);
        let rhs = lift_u(&pi_t(t, &d_lib(t, i, &a)?)).scale(-I);
        if lhs != rhs {
            mismatches += 1;
            worst = worst.max(max_deviation(&TracePoly::from(&lhs), &TracePoly::from(&rhs)));
        }
    }
    let params = json!({ "cases": settings.cases, "max_degree": 6, "max_components": 3 });
    let r = CheckReport::new("lemma6_1_intertwine", params, mismatches as f64, 0.0, 0.0, None);
    Ok(vec![if mismatches > 0 { r.with_note(format!("largest coefficient deviation {worst:e}")) } else { r }])
}

/// `E(Π^t 𝔇_{t,i'}((y_i(s) − y_i(r)) a)) = δ_{i,i'} i 1_{(r,s]}(t) y_i(t) a`
/// for random `a` in the past of `r`.
pub fn lemma3_8_gradient(settings: &CheckSettings) -> Result<Vec<CheckReport>> {
    let mut rng = rng(settings, 38);
    let grid = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
    let probes = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1];
    let mut worst = 0.0f64;
    let cases = settings.cases.min(50).max(1);
    for _ in 0..cases {
        let ri = rng.random_range(0..grid.len() - 1);
        let si = rng.random_range(ri + 1..grid.len());
        let (r, s) = (Time::from_secs(grid[ri]), Time::from_secs(grid[si]));
        let past: Vec<Time> = secs(&grid[..=ri]);
        let mut a = NCPoly::zero();
        for _ in 0..rng.random_range(1..=2) {
            a.add_term(random_u_word(&mut rng, 2, &past, 3), random_coef(&mut rng));
        }
        let (i, i2) = (rng.random_range(1..=2), rng.random_range(1..=2));
        let t = Time::from_secs(pick(&mut rng, &probes));
        let p = (y_coord(i, s) - y_coord(i, r)) * a.clone();
        let got = projected_gradient(&p, i2, t)?;
        let expected = if i == i2 && r < t && t <= s { TracePoly::from((&y_coord(i, t) * &a).scale(I)) } else { TracePoly::zero() };
        worst = worst.max(max_deviation(&got, &expected) / scale_of(&expected));
    }
    Ok(vec![CheckReport::new("lemma3_8_gradient", json!({ "cases": cases }), worst, 0.0, 1e-12, None)])
}

/// Identifies `Tr(x_ij(t'))` across times: `τ(x_ij(t)) = φ(u x_ij u*)` does
/// not depend on `t` for lifted states.
fn freeze_single_traces(g: &TracePoly) -> TracePoly {
    let mut out = TracePoly::zero();
    for (symbols, carrier, c) in g.terms() {
        let syms: Vec<Word> = symbols
            .iter()
            .map(|s| match s.letters() {
                [Letter::XL { i, j, .. }] => Word::letter(Letter::xl(*i, *j, Time::ZERO)),
                _ => s.clone(),
            })
            .collect();
        out.add_term(syms, carrier.clone(), *c);
    }
    out
}

/// `E(Π^t 𝔇_{t,i}((e^s x̊_{i'j}(s) − e^r x̊_{i'j}(r)) a)) = δ 1_{(r,s]}(t) [a, e^t x_ij(t)]`.
pub fn lemma6_3_gradient(settings: &CheckSettings) -> Result<Vec<CheckReport>> {
    let mut rng = rng(settings, 63);
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let probes = [0.0, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0, 1.2];
    let mut worst = 0.0f64;
    let cases = settings.cases.min(50).max(1);
    for _ in 0..cases {
        let n = 2;
        let ri = rng.random_range(0..grid.len() - 1);
        let si = rng.random_range(ri + 1..grid.len());
        let (r, s) = (Time::from_secs(grid[ri]), Time::from_secs(grid[si]));
        let past: Vec<Time> = secs(&grid[..=ri]);
        let a = NCPoly::from_word(random_lib_word(&mut rng, n, &past, 3), random_coef(&mut rng));
        let (i, i2, j) = (rng.random_range(1..=n), rng.random_range(1..=n), rng.random_range(1..=2));
        let t = Time::from_secs(pick(&mut rng, &probes));
        let (es, er) = (s.secs().exp(), r.secs().exp());
        let xs = NCPoly::from_word(Word::letter(Letter::xl(i2, j, s)), C64::new(es, 0.0));
        let xr = NCPoly::from_word(Word::letter(Letter::xl(i2, j, r)), C64::new(er, 0.0));
        let main = projected_gradient_lib(&((xs - xr) * a.clone()), i, t)?;
        let centering = TracePoly::trace_symbol(Word::letter(Letter::xl(i2, j, Time::ZERO)))
            .scale(C64::new(es - er, 0.0))
            .multiply(&projected_gradient_lib(&a, i, t)?);
        let got = freeze_single_traces(&(main - centering));
        let expected = if i == i2 && r < t && t <= s {
            let x = NCPoly::from_word(Word::letter(Letter::xl(i, j, t)), C64::new(t.secs().exp(), 0.0));
            TracePoly::from(&(a.clone() * x.clone() - x * a.clone()))
        } else {
            TracePoly::zero()
        };
        worst = worst.max(max_deviation(&got, &expected) / scale_of(&expected));
    }
    Ok(vec![CheckReport::new("lemma6_3_gradient", json!({ "cases": cases }), worst, 0.0, 1e-12, None)])
}

/// The rate integrand of a liberation potential agrees with that of its
/// lift, symbolically and after evaluation under one shared state.
pub fn sec6_3_rate_relation(settings: &CheckSettings) -> Result<Vec<CheckReport>> {
    let (a, b) = (Letter::xl(1, 1, 0.5), Letter::xl(2, 1, 0.25));
    let c_lib = NCPoly::word([a, b]) + NCPoly::word([b, a]) + NCPoly::word([a, Letter::xl(1, 2, 0.25), a]);
    let c_u = lift_u(&c_lib);
    let t_end = Time::from_secs(0.5);
    let grid = uniform_grid(t_end, 10, letter_times_of(&c_lib));
    let times = letter_times_of(&c_lib);
    let mut ev = CondExpect::new();
    let mut worst = 0.0f64;
    for &t in &grid {
        for right in [false, true] {
            if right && !times.contains(&t) {
                continue;
            }
            let lib = energy_density(&mut ev, &c_lib, t, Alphabet::Liberation, right)?;
            let uni = energy_density(&mut ev, &c_u, t, Alphabet::Unitary, right)?;
            worst = worst.max(max_deviation(&lift_tp(&lib), &uni) / scale_of(&uni));
        }
    }
    let mut out = vec![CheckReport::new("sec6_3_rate_relation", json!({ "stage": "symbolic", "grid_points": grid.len() }), worst, 0.0, 1e-12, None)];

    let mut cfg = SimConfig::new(settings.small_size, 2, t_end.secs(), 0.05, settings.small_samples, settings.seed).with_snapshot_times(grid.iter().copied());
    cfg.norm_cap = settings.norm_cap;
    cfg.x_spec = settings.x_spec.clone();
    cfg.x_families = 2;
    let ens = simulate_paths(&cfg)?;
    let oracle = EmpiricalOracle::new(&ens);
    let via_u = rate_of_potential(&oracle, &c_u, &grid)?;
    let lifted = LiftedOracle::new(&oracle);
    let via_lib = rate_of_potential_in(&lifted, &c_lib, &grid, Alphabet::Liberation)?;
    let params = json!({ "stage": "shared_oracle", "size": cfg.size, "samples": cfg.samples, "lifted_value": via_u });
    out.push(CheckReport::new("sec6_3_rate_relation", params, via_lib, via_u, 1e-10, None));
    Ok(out)
}

//! Trace oracles: tracial states evaluated on words.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64 as C64;

use crate::cond_expect::{CondExpect, TracePoly};
use crate::error::{LabError, Result};
use crate::matrix_sim::{eval_word_trace, CMat, MatrixSource, TraceEstimate, UnitaryPathEnsemble, XMatrices};
use crate::nc_algebra::{lift_u, pi_t, Letter, NCPoly, Time, Word};

/// A tracial state on words. Trace symbols of a [`TracePoly`] are replaced by
/// the oracle's own values.
pub trait TraceOracle: Sync {
    fn trace(&self, w: &Word) -> Result<C64>;

    /// Standard error of [`TraceOracle::trace`]; zero for exact oracles.
    fn stderr(&self, _w: &Word) -> Result<f64> {
        Ok(0.0)
    }

    fn eval(&self, tp: &TracePoly) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (symbols, carrier, c) in tp.terms() {
            let mut v = *c * self.trace(carrier)?;
            for s in symbols {
                v *= self.trace(s)?;
            }
            acc += v;
        }
        Ok(acc)
    }

    fn eval_poly(&self, p: &NCPoly) -> Result<C64> {
        self.eval(&TracePoly::from(p))
    }
}

fn key(w: &Word) -> Word {
    w.cyclic_canonical()
}

/// Ensemble means `E tr_N π_N(w)`, cached per cyclic class.
pub struct EmpiricalOracle<'a> {
    ens: &'a UnitaryPathEnsemble,
    cache: Mutex<HashMap<Word, TraceEstimate>>,
}

impl<'a> EmpiricalOracle<'a> {
    pub fn new(ens: &'a UnitaryPathEnsemble) -> Self {
        EmpiricalOracle { ens, cache: Mutex::new(HashMap::new()) }
    }

    pub fn estimate(&self, w: &Word) -> Result<TraceEstimate> {
        let k = key(w);
        if let Some(e) = self.cache.lock().expect("cache lock").get(&k) {
            return Ok(*e);
        }
        let e = if k.is_empty() {
            TraceEstimate { mean: C64::new(1.0, 0.0), stderr: 0.0, samples: self.ens.len() }
        } else {
            self.ens.trace_estimate(&k)?
        };
        self.cache.lock().expect("cache lock").insert(k, e);
        Ok(e)
    }
}

impl TraceOracle for EmpiricalOracle<'_> {
    fn trace(&self, w: &Word) -> Result<C64> {
        Ok(self.estimate(w)?.mean)
    }

    fn stderr(&self, w: &Word) -> Result<f64> {
        Ok(self.estimate(w)?.stderr)
    }
}

/// Fixed moment table keyed by cyclic class; `Tr(w*)` falls back to the
/// conjugate of `Tr(w)`.
#[derive(Clone, Debug, Default)]
pub struct TableOracle {
    table: HashMap<Word, C64>,
}

impl TableOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, w: &Word, v: C64) {
        self.table.insert(key(w), v);
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl TraceOracle for TableOracle {
    fn trace(&self, w: &Word) -> Result<C64> {
        if w.is_empty() {
            return Ok(C64::new(1.0, 0.0));
        }
        if let Some(v) = self.table.get(&key(w)) {
            return Ok(*v);
        }
        if let Some(v) = self.table.get(&key(&w.adjoint())) {
            return Ok(v.conj());
        }
        Err(LabError::MissingMoment(w.to_string()))
    }
}

/// The deterministic matrices alone: words in `X` letters and `u(0) = 1`.
pub struct XMatrixOracle<'a> {
    x: &'a XMatrices,
}

impl<'a> XMatrixOracle<'a> {
    pub fn new(x: &'a XMatrices) -> Self {
        XMatrixOracle { x }
    }
}

impl MatrixSource for XMatrixOracle<'_> {
    fn x_matrices(&self) -> &XMatrices {
        self.x
    }

    fn components(&self) -> u32 {
        self.x.keys().map(|(g, _)| g).max().unwrap_or(1).saturating_sub(1)
    }

    fn unitary(&self, _i: u32, t: Time) -> Result<Option<&CMat>> {
        if t.is_zero() {
            Ok(None)
        } else {
            Err(LabError::MissingSnapshot(t))
        }
    }
}

impl TraceOracle for XMatrixOracle<'_> {
    fn trace(&self, w: &Word) -> Result<C64> {
        eval_word_trace(self, w)
    }
}

/// `σ₀^frBM`: the `x` marginal of `x_oracle`, with `u` a free unitary
/// Brownian motion started at `1` and free from `x`.
pub struct Sigma0Frbm<'a> {
    x: &'a dyn TraceOracle,
    cache: Mutex<HashMap<Word, C64>>,
}

impl<'a> Sigma0Frbm<'a> {
    pub fn new(x_oracle: &'a dyn TraceOracle) -> Self {
        Sigma0Frbm { x: x_oracle, cache: Mutex::new(HashMap::new()) }
    }

    /// The symbolic reduction of `σ₀^frBM(w)` to a trace polynomial in `x`
    /// letters only.
    pub fn reduce(w: &Word) -> Result<TracePoly> {
        if let Some(l) = w.letters().iter().find(|l| !matches!(l, Letter::X { .. } | Letter::U { .. })) {
            return Err(LabError::UnexpectedLetter { op: "sigma0_frbm", letter: *l });
        }
        let shifted = pi_t(Time::ZERO, &NCPoly::from(w.clone()));
        let e = CondExpect::new().poly(&shifted, Time::ZERO)?;
        Ok(e.map_letters(|l| match l {
            Letter::U { .. } => Word::empty(),
            other => Word::letter(*other),
        }))
    }
}

impl TraceOracle for Sigma0Frbm<'_> {
    fn trace(&self, w: &Word) -> Result<C64> {
        let k = key(w);
        if let Some(v) = self.cache.lock().expect("cache lock").get(&k) {
            return Ok(*v);
        }
        let v = self.x.eval(&Self::reduce(&k)?)?;
        self.cache.lock().expect("cache lock").insert(k, v);
        Ok(v)
    }
}

/// A state on the liberation alphabet obtained from a state on `x`, `u`
/// through the lift: `w ↦ φ(ᵘw)`.
pub struct LiftedOracle<'a> {
    inner: &'a dyn TraceOracle,
}

impl<'a> LiftedOracle<'a> {
    pub fn new(inner: &'a dyn TraceOracle) -> Self {
        LiftedOracle { inner }
    }
}

impl TraceOracle for LiftedOracle<'_> {
    fn trace(&self, w: &Word) -> Result<C64> {
        let lifted = lift_u(&NCPoly::from(w.clone()));
        self.inner.eval_poly(&lifted)
    }

    fn stderr(&self, w: &Word) -> Result<f64> {
        let lifted = lift_u(&NCPoly::from(w.clone()));
        let single = if lifted.len() == 1 { lifted.terms().next().map(|(lw, _)| lw.clone()) } else { None };
        match single {
            Some(lw) => self.inner.stderr(&lw),
            None => Ok(0.0),
        }
    }
}

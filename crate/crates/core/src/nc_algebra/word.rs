//! Letters and canonically reduced words.

use std::fmt;

use super::time::Time;

/// One generator of the word algebra.
///
/// `X { g, j }` is the time-independent self-adjoint letter. Plain families use
/// `g = 0`; the lift of a liberation letter `x_{ij}` lands on `X { g: i, j }`, and
/// the static liberation family `x_{n+1,j}` is written directly as `X { g: n+1, j }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    X { g: u32, j: u32 },
    XL { i: u32, j: u32, t: Time },
    U { i: u32, t: Time, star: bool },
    UT { i: u32, t: Time, star: bool },
    V { i: u32, t: Time, star: bool },
}

/// Coarse alphabet class of a letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    X,
    XL,
    U,
    UT,
    V,
}

impl Letter {
    pub fn x(j: u32) -> Self {
        Letter::X { g: 0, j }
    }

    pub fn x_family(g: u32, j: u32) -> Self {
        Letter::X { g, j }
    }

    pub fn xl(i: u32, j: u32, t: impl Into<Time>) -> Self {
        Letter::XL { i, j, t: t.into() }
    }

    pub fn u(i: u32, t: impl Into<Time>) -> Self {
        Letter::U { i, t: t.into(), star: false }
    }

    pub fn u_star(i: u32, t: impl Into<Time>) -> Self {
        Letter::U { i, t: t.into(), star: true }
    }

    pub fn ut(i: u32, t: impl Into<Time>) -> Self {
        Letter::UT { i, t: t.into(), star: false }
    }

    pub fn ut_star(i: u32, t: impl Into<Time>) -> Self {
        Letter::UT { i, t: t.into(), star: true }
    }

    pub fn v(i: u32, t: impl Into<Time>) -> Self {
        Letter::V { i, t: t.into(), star: false }
    }

    pub fn v_star(i: u32, t: impl Into<Time>) -> Self {
        Letter::V { i, t: t.into(), star: true }
    }

    pub fn kind(&self) -> Kind {
        match self {
            Letter::X { .. } => Kind::X,
            Letter::XL { .. } => Kind::XL,
            Letter::U { .. } => Kind::U,
            Letter::UT { .. } => Kind::UT,
            Letter::V { .. } => Kind::V,
        }
    }

    pub fn adjoint(self) -> Self {
        match self {
            Letter::U { i, t, star } => Letter::U { i, t, star: !star },
            Letter::UT { i, t, star } => Letter::UT { i, t, star: !star },
            Letter::V { i, t, star } => Letter::V { i, t, star: !star },
            other => other,
        }
    }

    pub fn time(&self) -> Option<Time> {
        match *self {
            Letter::X { .. } => None,
            Letter::XL { t, .. } | Letter::U { t, .. } | Letter::UT { t, .. } | Letter::V { t, .. } => Some(t),
        }
    }

    /// Group index `i` for time-dependent letters.
    pub fn index(&self) -> Option<u32> {
        match *self {
            Letter::X { .. } => None,
            Letter::XL { i, .. } | Letter::U { i, .. } | Letter::UT { i, .. } | Letter::V { i, .. } => Some(i),
        }
    }

    /// True for letters of the free unitary Brownian families (`ũ` and `v`).
    pub fn is_free_family(&self) -> bool {
        matches!(self, Letter::UT { .. } | Letter::V { .. })
    }

    /// `ũ_i(0)` and `v_i(0)` are the unit.
    fn is_unit(&self) -> bool {
        matches!(self, Letter::UT { t, .. } | Letter::V { t, .. } if t.is_zero())
    }

    fn cancels(&self, other: &Letter) -> bool {
        match (self, other) {
            (Letter::U { i, t, star }, Letter::U { i: i2, t: t2, star: s2 })
            | (Letter::UT { i, t, star }, Letter::UT { i: i2, t: t2, star: s2 })
            | (Letter::V { i, t, star }, Letter::V { i: i2, t: t2, star: s2 }) => i == i2 && t == t2 && star != s2,
            _ => false,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |star: &bool| if *star { "*" } else { "" };
        match self {
            Letter::X { g: 0, j } => write!(f, "x({j})"),
            Letter::X { g, j } => write!(f, "x({g},{j})"),
            Letter::XL { i, j, t } => write!(f, "xl({i},{j},{t})"),
            Letter::U { i, t, star } => write!(f, "u{}({i},{t})", s(star)),
            Letter::UT { i, t, star } => write!(f, "ut{}({i},{t})", s(star)),
            Letter::V { i, t, star } => write!(f, "v{}({i},{t})", s(star)),
        }
    }
}

/// A word kept in canonical form: no adjacent inverse unitary pairs and no
/// unit letters `ũ(0)`, `v(0)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Word::empty();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn letter(l: Letter) -> Self {
        Word::new([l])
    }

    /// Appends with on-the-fly reduction. A stack discipline reaches the fixed
    /// point of pairwise cancellation in one pass.
    pub fn push(&mut self, l: Letter) {
        if l.is_unit() {
            return;
        }
        if let Some(last) = self.0.last() {
            if last.cancels(&l) {
                self.0.pop();
                return;
            }
        }
        self.0.push(l);
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &l in &other.0 {
            w.push(l);
        }
        w
    }

    pub fn adjoint(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.adjoint()).collect())
    }

    /// Sub-word `[a, b)`, reduced.
    pub fn slice(&self, a: usize, b: usize) -> Word {
        Word::new(self.0[a..b].iter().copied())
    }

    /// Canonical representative of the word under cyclic rotation, after
    /// cancelling inverse pairs across the wrap-around.
    pub fn cyclic_canonical(&self) -> Word {
        let mut v = self.0.clone();
        while v.len() >= 2 && v[v.len() - 1].cancels(&v[0]) {
            v.pop();
            v.remove(0);
        }
        let n = v.len();
        if n <= 1 {
            return Word(v);
        }
        let mut best = 0;
        for r in 1..n {
            let better = (0..n).map(|k| &v[(r + k) % n]).lt((0..n).map(|k| &v[(best + k) % n]));
            if better {
                best = r;
            }
        }
        Word((0..n).map(|k| v[(best + k) % n]).collect())
    }

    pub fn max_time(&self) -> Option<Time> {
        self.0.iter().filter_map(|l| l.time()).max()
    }

    pub fn has_kind(&self, kind: Kind) -> bool {
        self.0.iter().any(|l| l.kind() == kind)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word::new(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_pairs_cancel() {
        let w = Word::new([Letter::u(1, 0.5), Letter::u_star(1, 0.5)]);
        assert!(w.is_empty());
        let w = Word::new([Letter::x(1), Letter::ut(1, 0.2), Letter::v(1, 0.2), Letter::ut_star(1, 0.2)]);
        assert_eq!(w.len(), 4);
    }

    #[test]
    fn nested_cancellation_reaches_fixed_point() {
        let w = Word::new([Letter::u(1, 1.0), Letter::u(2, 0.5), Letter::u_star(2, 0.5), Letter::u_star(1, 1.0), Letter::x(3)]);
        assert_eq!(w, Word::letter(Letter::x(3)));
    }

    #[test]
    fn different_times_do_not_cancel() {
        let w = Word::new([Letter::u(1, 1.0), Letter::u_star(1, 0.5)]);
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn free_family_at_zero_is_unit_but_u_is_not() {
        assert!(Word::letter(Letter::ut(1, 0.0)).is_empty());
        assert!(Word::letter(Letter::v_star(2, 0.0)).is_empty());
        assert_eq!(Word::letter(Letter::u(1, 0.0)).len(), 1);
    }

    #[test]
    fn cyclic_canonical_is_rotation_invariant() {
        let letters = [Letter::x(2), Letter::u(1, 0.5), Letter::x(1), Letter::u_star(1, 0.3)];
        let w = Word::new(letters);
        for r in 0..4 {
            let rot = Word::new((0..4).map(|k| letters[(r + k) % 4]));
            assert_eq!(rot.cyclic_canonical(), w.cyclic_canonical());
        }
        let wrap = Word::new([Letter::u(1, 0.5), Letter::x(1), Letter::u_star(1, 0.5)]);
        assert_eq!(wrap.cyclic_canonical(), Word::letter(Letter::x(1)));
    }
}

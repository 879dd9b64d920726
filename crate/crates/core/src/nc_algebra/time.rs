//! Process times stored as integer ticks so that indicator functions such as
//! `1_{[0,t']}(t)` compare exactly.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Length of one tick in process-time units.
pub const TICK: f64 = 1e-6;

/// A nonnegative point in process time, counted in ticks of [`TICK`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Time(i64);

impl Time {
    pub const ZERO: Time = Time(0);

    pub const fn from_ticks(ticks: i64) -> Self {
        Time(ticks)
    }

    /// Rounds `secs` to the nearest tick.
    pub fn from_secs(secs: f64) -> Self {
        Time((secs / TICK).round() as i64)
    }

    pub fn ticks(self) -> i64 {
        self.0
    }

    pub fn secs(self) -> f64 {
        self.0 as f64 * TICK
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// `(self - other) ∨ 0`.
    pub fn saturating_sub(self, other: Time) -> Time {
        Time((self.0 - other.0).max(0))
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

impl From<f64> for Time {
    fn from(secs: f64) -> Self {
        Time::from_secs(secs)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Shortest decimal that round-trips through the tick grid.
        let whole = self.0.div_euclid(1_000_000);
        let frac = self.0.rem_euclid(1_000_000);
        if frac == 0 {
            write!(f, "{whole}")
        } else {
            let s = format!("{frac:06}");
            write!(f, "{whole}.{}", s.trim_end_matches('0'))
        }
    }
}

impl Serialize for Time {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.secs())
    }
}

impl<'de> Deserialize<'de> for Time {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let secs = f64::deserialize(d)?;
        if !secs.is_finite() || secs < 0.0 {
            return Err(serde::de::Error::custom(format!("time must be finite and >= 0, got {secs}")));
        }
        Ok(Time::from_secs(secs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_exact_on_decimal_inputs() {
        assert_eq!(Time::from_secs(0.3) + Time::from_secs(0.4), Time::from_secs(0.7));
        assert_eq!(Time::from_secs(1.0) - Time::from_secs(0.7), Time::from_secs(0.3));
    }

    #[test]
    fn display_trims_zeros() {
        assert_eq!(Time::from_secs(0.5).to_string(), "0.5");
        assert_eq!(Time::from_secs(2.0).to_string(), "2");
        assert_eq!(Time::from_secs(0.000001).to_string(), "0.000001");
    }

    #[test]
    fn saturating_sub_clamps() {
        assert_eq!(Time::from_secs(0.2).saturating_sub(Time::from_secs(0.5)), Time::ZERO);
    }
}

//! Check reports.

use serde::{Deserialize, Serialize};

/// Plot-ready density comparison: columns `x`, `empirical`, `theoretical`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub x: Vec<f64>,
    pub empirical: Vec<f64>,
    pub theoretical: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub parameters: serde_json::Value,
    /// `NaN` when the computation failed; written as JSON `null`.
    #[serde(with = "nan_as_null")]
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub stderr: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Histogram>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

impl CheckReport {
    /// Builds a report; `pass ⇔ |observed − expected| ≤ max(tolerance, 3·stderr)`.
    pub fn new(name: &str, parameters: serde_json::Value, observed: f64, expected: f64, tolerance: f64, stderr: Option<f64>) -> Self {
        let allowed = tolerance.max(3.0 * stderr.unwrap_or(0.0));
        let pass = (observed - expected).abs() <= allowed;
        CheckReport { name: name.to_string(), parameters, observed, expected, tolerance, stderr, pass, histogram: None, note: None }
    }

    /// A report for a computation that failed outright.
    pub fn failure(name: &str, parameters: serde_json::Value, msg: String) -> Self {
        let mut r = CheckReport::new(name, parameters, f64::NAN, 0.0, 0.0, None);
        r.pass = false;
        r.note = Some(msg);
        r
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_histogram(mut self, h: Histogram) -> Self {
        self.histogram = Some(h);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn pass_rule() {
        assert!(CheckReport::new("a", json!({}), 1.05, 1.0, 0.1, None).pass);
        assert!(!CheckReport::new("a", json!({}), 1.5, 1.0, 0.1, Some(0.1)).pass);
        assert!(CheckReport::new("a", json!({}), 1.25, 1.0, 0.1, Some(0.1)).pass);
        assert!(!CheckReport::new("a", json!({}), f64::NAN, 1.0, 0.1, None).pass);
    }

    #[test]
    fn failure_round_trips() {
        let r = CheckReport::failure("a", json!({}), "boom".into());
        let back: CheckReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert!(back.observed.is_nan() && !back.pass && back.note.as_deref() == Some("boom"));
    }
}

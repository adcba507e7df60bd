//! Run manifests: what was run, with which parameters, what it wrote, and every
//! tolerance check with its achieved value.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// One tolerance check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceResult {
    pub name: String,
    /// Achieved value (relative error, residual, …). `None` if it was not finite.
    pub achieved: Option<f64>,
    /// Threshold the value is compared against.
    pub tolerance: f64,
    pub passed: bool,
}

impl ToleranceResult {
    /// `achieved ≤ tolerance` (a non-finite value fails).
    pub fn at_most(name: impl Into<String>, achieved: f64, tolerance: f64) -> Self {
        let passed = achieved <= tolerance;
        Self { name: name.into(), achieved: achieved.is_finite().then_some(achieved), tolerance, passed }
    }

    /// `achieved ≥ tolerance` (a non-finite value fails).
    pub fn at_least(name: impl Into<String>, achieved: f64, tolerance: f64) -> Self {
        let passed = achieved >= tolerance;
        Self { name: name.into(), achieved: achieved.is_finite().then_some(achieved), tolerance, passed }
    }

    /// A boolean property; achieved is 1 (true) or 0 (false) against tolerance 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), achieved: Some(if ok { 1.0 } else { 0.0 }), tolerance: 1.0, passed: ok }
    }
}

/// Record of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Subcommand path, e.g. `triple ladder`.
    pub command: String,
    /// All effective parameters (flags, config values, precision settings).
    pub parameters: BTreeMap<String, serde_json::Value>,
    /// Files written.
    pub outputs: Vec<String>,
    /// Wall time in seconds.
    pub wall_time: f64,
    pub tolerance_results: Vec<ToleranceResult>,
    /// Command-specific results (values, fits, reports).
    #[serde(default)]
    pub results: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            parameters: BTreeMap::new(),
            outputs: Vec::new(),
            wall_time: 0.0,
            tolerance_results: Vec::new(),
            results: serde_json::Value::Null,
        }
    }

    /// Whether every tolerance check passed.
    pub fn all_passed(&self) -> bool {
        self.tolerance_results.iter().all(|t| t.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json() + "\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let mut m = RunManifest::new("triple ladder");
        m.parameters.insert("weight".into(), serde_json::json!(12));
        m.parameters.insert("rel_tol".into(), serde_json::json!(1e-12));
        m.parameters.insert("ladder".into(), serde_json::json!([16.0, 32.0]));
        m.outputs.push("run.json".into());
        m.wall_time = 0.1 + 0.2;
        m.tolerance_results.push(ToleranceResult::at_most("a", 1.0 / 3.0, 1e-6));
        m.tolerance_results.push(ToleranceResult::at_most("nan", f64::NAN, 1e-6));
        m.tolerance_results.push(ToleranceResult::holds("b", true));
        m.results = serde_json::json!({"slope": -0.4236017339926562_f64, "tiny": 4.9e-324_f64});
        let back = RunManifest::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), m.to_json());
        assert!(!m.tolerance_results[1].passed);
    }
}

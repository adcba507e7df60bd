//! Shared numerical precision settings.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Quadrature step sizes, contour truncation heights and series tolerances
/// shared by all numerical operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionConfig {
    /// Target relative error, in (0, 1e-4].
    pub rel_tol: f64,
    /// Truncation of Mellin–Barnes lines in the imaginary direction (≥ 20).
    pub contour_height: f64,
    /// Initial quadrature points per unit length (≥ 8).
    pub quad_points: usize,
    /// Maximum number of series terms (≥ 64).
    pub series_max_terms: usize,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig { rel_tol: 1e-12, contour_height: 40.0, quad_points: 8, series_max_terms: 4096 }
    }
}

impl PrecisionConfig {
    /// Check the documented invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-4) {
            return Err(Error::domain(format!("rel_tol {} not in (0, 1e-4]", self.rel_tol)));
        }
        if !(self.contour_height >= 20.0) {
            return Err(Error::domain(format!("contour_height {} < 20", self.contour_height)));
        }
        if self.quad_points < 8 {
            return Err(Error::domain(format!("quad_points {} < 8", self.quad_points)));
        }
        if self.series_max_terms < 64 {
            return Err(Error::domain(format!("series_max_terms {} < 64", self.series_max_terms)));
        }
        Ok(())
    }

    /// Same configuration with a different relative tolerance.
    pub fn with_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        PrecisionConfig::default().validate().unwrap();
    }

    #[test]
    fn invariants_enforced() {
        let mut c = PrecisionConfig::default();
        c.rel_tol = 1e-3;
        assert!(c.validate().is_err());
        let mut c = PrecisionConfig::default();
        c.contour_height = 10.0;
        assert!(c.validate().is_err());
        let mut c = PrecisionConfig::default();
        c.quad_points = 4;
        assert!(c.validate().is_err());
        let mut c = PrecisionConfig::default();
        c.series_max_terms = 10;
        assert!(c.validate().is_err());
    }
}

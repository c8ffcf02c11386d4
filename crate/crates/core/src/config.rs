use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances shared by every numerical routine in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericConfig {
    /// Level-set residual `|θ(η) − ω|` accepted after polishing.
    pub root_tol: f64,
    /// Minimum separation between distinct level-set points.
    pub distinct_tol: f64,
    /// Number of nodes of the trapezoidal rule on the circle.
    pub quadrature_points: usize,
    /// Largest change allowed between the N/2- and N-point rules.
    pub quadrature_tol: f64,
    /// Threshold for the yes/no representation verdicts.
    pub decision_tol: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            root_tol: 1e-10,
            distinct_tol: 1e-8,
            quadrature_points: 4096,
            quadrature_tol: 1e-9,
            decision_tol: 1e-8,
        }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("root_tol", self.root_tol),
            ("distinct_tol", self.distinct_tol),
            ("quadrature_tol", self.quadrature_tol),
            ("decision_tol", self.decision_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.quadrature_points < 16 || !self.quadrature_points.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "quadrature_points must be even and at least 16, got {}",
                self.quadrature_points
            )));
        }
        Ok(())
    }
}

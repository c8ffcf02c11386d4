//! Trapezoidal rule on the unit circle, `(1/2π)∮ f(e^{iφ}) dφ`.
//!
//! For the smooth periodic integrands met here (rational functions with
//! poles outside the closed disc) the rule converges geometrically, so the
//! even-indexed half of the nodes doubles as a built-in convergence check.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CircleRule {
    nodes: Vec<Complex64>,
}

impl CircleRule {
    pub fn new(points: usize) -> Result<Self> {
        if points < 16 || !points.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "quadrature needs an even number of at least 16 points, got {points}"
            )));
        }
        let nodes = (0..points).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / points as f64)).collect();
        Ok(CircleRule { nodes })
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Returns the N-point and N/2-point means of `f(k, z_k)`.
    pub fn means<F>(&self, mut f: F) -> (Complex64, Complex64)
    where
        F: FnMut(usize, Complex64) -> Complex64,
    {
        let mut even = Complex64::new(0.0, 0.0);
        let mut odd = Complex64::new(0.0, 0.0);
        for (k, &z) in self.nodes.iter().enumerate() {
            let v = f(k, z);
            if k % 2 == 0 {
                even += v;
            } else {
                odd += v;
            }
        }
        let half = self.nodes.len() as f64 / 2.0;
        ((even + odd) / (2.0 * half), even / half)
    }

    /// N-point mean, failing when the N/2-point rule disagrees by more than `tol`.
    pub fn mean_checked<F>(&self, tol: f64, f: F) -> Result<Complex64>
    where
        F: FnMut(usize, Complex64) -> Complex64,
    {
        let (full, half) = self.means(f);
        let change = (full - half).norm();
        if !(change <= tol) {
            return Err(Error::QuadratureNotConverged { change });
        }
        Ok(full)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_monomials_exactly() {
        let rule = CircleRule::new(64).unwrap();
        let one = rule.mean_checked(1e-14, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        assert!((one - 1.0).norm() < 1e-15);
        let z3 = rule.mean_checked(1e-14, |_, z| z * z * z).unwrap();
        assert!(z3.norm() < 1e-15);
    }

    #[test]
    fn geometric_series() {
        // (1/2π)∮ |1/(1 − z/2)|² = Σ 4^{-k} = 4/3
        let rule = CircleRule::new(256).unwrap();
        let v = rule.mean_checked(1e-12, |_, z| Complex64::new(1.0 / (1.0 - z / 2.0).norm_sqr(), 0.0)).unwrap();
        assert!((v - 4.0 / 3.0).norm() < 1e-14);
    }

    #[test]
    fn flags_under_resolved_integrands() {
        let rule = CircleRule::new(16).unwrap();
        let r = rule.mean_checked(1e-9, |_, z| Complex64::new(1.0 / (1.0 - 0.99 * z).norm_sqr(), 0.0));
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
    }

    #[test]
    fn rejects_odd_sizes() {
        assert!(CircleRule::new(17).is_err());
        assert!(CircleRule::new(8).is_err());
    }
}

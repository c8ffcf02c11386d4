//! Finite Blaschke products `θ(z) = c ∏ (z − λᵢ)/(1 − λ̄ᵢ z)`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::config::NumericConfig;
use crate::error::{Error, Result};
use crate::poly;

const POLE_TOL: f64 = 1e-14;
const UNIMODULAR_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<Complex64>,
    constant: Complex64,
}

impl BlaschkeProduct {
    /// Zeros are counted with multiplicity and must lie in the open disc;
    /// the front constant must be unimodular.
    pub fn new(zeros: Vec<Complex64>, constant: Complex64) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::InvalidBlaschke("order must be at least 1".into()));
        }
        if let Some(z) = zeros.iter().find(|z| !(z.norm() < 1.0) || !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidBlaschke(format!("zero {z} is not in the open unit disc")));
        }
        if !((constant.norm() - 1.0).abs() < UNIMODULAR_TOL) {
            return Err(Error::InvalidBlaschke(format!("front constant {constant} is not unimodular")));
        }
        Ok(BlaschkeProduct { zeros, constant })
    }

    /// `θ(z) = z^n`.
    pub fn monomial(order: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); order], Complex64::new(1.0, 0.0))
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn order(&self) -> usize {
        self.zeros.len()
    }

    fn check_pole(&self, z: Complex64) -> Result<()> {
        if self.zeros.iter().any(|l| (1.0 - l.conj() * z).norm() < POLE_TOL) {
            return Err(Error::Pole { z });
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().fold(self.constant, |acc, l| acc * (z - l) / (1.0 - l.conj() * z))
    }

    /// `θ′(z)` by the product rule over the Möbius factors.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        self.check_pole(z)?;
        let factors: Vec<Complex64> = self.zeros.iter().map(|l| (z - l) / (1.0 - l.conj() * z)).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (i, l) in self.zeros.iter().enumerate() {
            let d = 1.0 - l.conj() * z;
            let mut term = (1.0 - l.norm_sqr()) / (d * d);
            for (j, f) in factors.iter().enumerate() {
                if j != i {
                    term *= f;
                }
            }
            total += term;
        }
        Ok(self.constant * total)
    }

    /// `∏ (z − λᵢ)` in ascending coefficients (front constant excluded).
    pub fn numerator_poly(&self) -> Vec<Complex64> {
        poly::from_roots(&self.zeros)
    }

    /// `∏ (1 − λ̄ᵢ z)` in ascending coefficients.
    pub fn denominator_poly(&self) -> Vec<Complex64> {
        self.zeros
            .iter()
            .fold(vec![Complex64::new(1.0, 0.0)], |acc, l| poly::mul(&acc, &[Complex64::new(1.0, 0.0), -l.conj()]))
    }

    /// Denominator `∏ (1 − λ̄ᵢ z)` evaluated at `z`.
    pub fn denominator(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().fold(Complex64::new(1.0, 0.0), |acc, l| acc * (1.0 - l.conj() * z))
    }

    /// `k_ζ(ζ) = ‖k_ζ‖²` for unimodular `ζ`, the limit of the reproducing
    /// kernel on the diagonal. Equals `|θ′(ζ)|`.
    pub fn boundary_kernel_norm_sq(&self, zeta: Complex64) -> Result<f64> {
        if (zeta.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::Precondition(format!("{zeta} is not on the unit circle")));
        }
        let value = zeta * self.derivative(zeta)? * self.eval(zeta)?.conj();
        Ok(value.re)
    }

    /// Derivative of `arg θ(e^{iφ})` with respect to `φ`; positive everywhere.
    fn arg_speed(&self, zeta: Complex64) -> f64 {
        self.zeros.iter().map(|l| (1.0 - l.norm_sqr()) / (zeta - l).norm_sqr()).sum()
    }

    /// The `n` unimodular solutions of `θ(η) = ω`, sorted by argument in
    /// `[0, 2π)`.
    ///
    /// Roots of `c·N(z) − ω·D(z)` come from the companion matrix, are
    /// projected onto the circle and then refined by Newton steps on the
    /// argument of `θ(e^{iφ})`.
    pub fn level_set(&self, omega: Complex64, cfg: &NumericConfig) -> Result<Vec<Complex64>> {
        if (omega.norm() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::Precondition(format!("ω = {omega} is not unimodular")));
        }
        let cleared = poly::axpy(
            &self.numerator_poly().iter().map(|c| c * self.constant).collect::<Vec<_>>(),
            -omega,
            &self.denominator_poly(),
        );
        let roots = poly::companion_roots(&cleared)?;
        let mut angles = Vec::with_capacity(roots.len());
        for root in roots {
            let mut phi = root.arg();
            for _ in 0..6 {
                let zeta = Complex64::from_polar(1.0, phi);
                let miss = (self.eval_unchecked(zeta) / omega).arg();
                let step = miss / self.arg_speed(zeta);
                phi -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            let mut phi = phi.rem_euclid(TAU);
            if TAU - phi < 1e-14 {
                phi = 0.0;
            }
            angles.push(phi);
        }
        angles.sort_by(f64::total_cmp);
        let etas: Vec<Complex64> = angles.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();

        for eta in &etas {
            let residual = (self.eval_unchecked(*eta) - omega).norm();
            if residual >= cfg.root_tol {
                return Err(Error::LevelSetResidual { residual });
            }
        }
        let mut gap = f64::INFINITY;
        for i in 0..etas.len() {
            for j in i + 1..etas.len() {
                gap = gap.min((etas[i] - etas[j]).norm());
            }
        }
        if gap < cfg.distinct_tol {
            return Err(Error::DegenerateRoots { gap });
        }
        Ok(etas)
    }

    /// Coefficients `(K₀, K₁, K₂, K₃)` of `K₃z³ − K₂z² + K₁z − K₀ = 0`, the
    /// cleared form of `θ(z) = 1` for an order-3 product with unit front
    /// constant.
    pub fn cubic_coefficients(&self) -> Result<[Complex64; 4]> {
        if self.order() != 3 {
            return Err(Error::Precondition(format!("order must be 3, got {}", self.order())));
        }
        if (self.constant - 1.0).norm() > UNIMODULAR_TOL {
            return Err(Error::Precondition("front constant must be 1".into()));
        }
        let [l1, l2, l3] = [self.zeros[0], self.zeros[1], self.zeros[2]];
        let (c1, c2, c3) = (l1.conj(), l2.conj(), l3.conj());
        let k3 = 1.0 + c1 * c2 * c3;
        let k2 = l1 + l2 + l3 + c1 * c2 + c1 * c3 + c2 * c3;
        let k1 = l1 * l2 + l1 * l3 + l2 * l3 + c1 + c2 + c3;
        let k0 = l1 * l2 * l3 + 1.0;
        Ok([k0, k1, k2, k3])
    }

    /// Roots of the cubic from [`cubic_coefficients`](Self::cubic_coefficients),
    /// via the closed-form solution.
    pub fn cubic_level_set(&self) -> Result<[Complex64; 3]> {
        let [k0, k1, k2, k3] = self.cubic_coefficients()?;
        poly::cubic_roots(k3, -k2, k1, -k0)
    }
}

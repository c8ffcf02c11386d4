//! Elements of `K_θ` in common-denominator form, the `H²` pairing, reproducing
//! kernels and the conjugation `C_θ f = θ·conj(z f)`.
//!
//! An element is `p(z)/D(z)` with `D(z) = ∏ (1 − λ̄ᵢ z)` and `deg p < n`.
//! In this form the conjugation is exact (reverse and conjugate the
//! coefficients) and kernels come out of an exact division, so floating
//! error only enters through quadrature.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::blaschke::BlaschkeProduct;
use crate::config::NumericConfig;
use crate::error::{Error, Result};
use crate::poly;
use crate::quadrature::CircleRule;

/// Gram residual accepted for any basis handed to the decision procedures.
pub const ORTHONORMAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct KThetaElement {
    theta: Arc<BlaschkeProduct>,
    numerator: Vec<Complex64>,
}

impl KThetaElement {
    pub fn new(theta: Arc<BlaschkeProduct>, numerator: Vec<Complex64>) -> Result<Self> {
        if numerator.len() != theta.order() {
            return Err(Error::Precondition(format!(
                "numerator needs {} coefficients, got {}",
                theta.order(),
                numerator.len()
            )));
        }
        Ok(KThetaElement { theta, numerator })
    }

    pub fn theta(&self) -> &Arc<BlaschkeProduct> {
        &self.theta
    }

    pub fn numerator(&self) -> &[Complex64] {
        &self.numerator
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let d = self.theta.denominator(z);
        if d.norm() < 1e-14 {
            return Err(Error::Pole { z });
        }
        Ok(poly::eval(&self.numerator, z) / d)
    }

    /// `C_θ f`: the coefficients reversed, conjugated and scaled by the front
    /// constant of `θ`.
    pub fn conjugate(&self) -> Self {
        let c = self.theta.constant();
        let numerator = self.numerator.iter().rev().map(|a| c * a.conj()).collect();
        KThetaElement { theta: Arc::clone(&self.theta), numerator }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        KThetaElement { theta: Arc::clone(&self.theta), numerator: self.numerator.iter().map(|a| s * a).collect() }
    }

    /// `Σ sᵢ fᵢ`; all terms must share `θ`.
    pub fn combination(terms: &[(Complex64, &KThetaElement)]) -> Result<Self> {
        let (_, first) = terms.first().ok_or_else(|| Error::Precondition("empty linear combination".into()))?;
        let mut numerator = vec![Complex64::new(0.0, 0.0); first.numerator.len()];
        for (s, f) in terms {
            if !same_theta(&first.theta, &f.theta) {
                return Err(Error::ThetaMismatch);
            }
            for (acc, a) in numerator.iter_mut().zip(&f.numerator) {
                *acc += s * a;
            }
        }
        Ok(KThetaElement { theta: Arc::clone(&first.theta), numerator })
    }

    /// Largest coefficient difference; meaningful only for a shared `θ`.
    pub fn coefficient_distance(&self, other: &KThetaElement) -> f64 {
        self.numerator.iter().zip(&other.numerator).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn same_theta(a: &Arc<BlaschkeProduct>, b: &Arc<BlaschkeProduct>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Orthonormal basis of `K_θ` together with the Gram residual measured when
/// it was assembled.
#[derive(Clone, Debug)]
pub struct OrthonormalBasis {
    elements: Vec<KThetaElement>,
    gram_residual: f64,
    label: String,
}

impl OrthonormalBasis {
    pub fn elements(&self) -> &[KThetaElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn gram_residual(&self) -> f64 {
        self.gram_residual
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `(v₁(z), …, v_n(z))`.
    pub fn eval_all(&self, z: Complex64) -> Result<Vec<Complex64>> {
        self.elements.iter().map(|v| v.eval(z)).collect()
    }

    /// Largest `‖C_θ vⱼ − vⱼ‖` over the basis.
    pub fn c_real_defect(&self, space: &ModelSpace) -> Result<(usize, f64)> {
        let mut worst = (0, 0.0);
        for (j, v) in self.elements.iter().enumerate() {
            let diff = KThetaElement::combination(&[
                (Complex64::new(1.0, 0.0), &v.conjugate()),
                (Complex64::new(-1.0, 0.0), v),
            ])?;
            let d = space.norm(&diff)?;
            if d > worst.1 {
                worst = (j, d);
            }
        }
        Ok(worst)
    }

    /// Fails with [`Error::NotCReal`] unless every element is fixed by `C_θ`
    /// within `tol`.
    pub fn require_c_real(&self, space: &ModelSpace, tol: f64) -> Result<()> {
        let (index, defect) = self.c_real_defect(space)?;
        if defect >= tol {
            return Err(Error::NotCReal { index, defect });
        }
        Ok(())
    }
}

/// A model space `K_θ` together with the quadrature used for its inner
/// product.
#[derive(Clone, Debug)]
pub struct ModelSpace {
    theta: Arc<BlaschkeProduct>,
    config: NumericConfig,
    rule: CircleRule,
    /// `1/|D(z_k)|²` at the quadrature nodes.
    weights: Vec<f64>,
}

impl ModelSpace {
    pub fn new(theta: BlaschkeProduct, config: NumericConfig) -> Result<Self> {
        Self::from_shared(Arc::new(theta), config)
    }

    pub fn from_shared(theta: Arc<BlaschkeProduct>, config: NumericConfig) -> Result<Self> {
        config.validate()?;
        let rule = CircleRule::new(config.quadrature_points)?;
        let weights = rule.nodes().iter().map(|&z| 1.0 / theta.denominator(z).norm_sqr()).collect();
        let space = ModelSpace { theta, config, rule, weights };
        space.check_quadrature()?;
        space.check_conjugation()?;
        Ok(space)
    }

    /// The Gram matrix of `zᵏ/D` must agree between the N/2- and N-point
    /// rules to 1e-12 (relative).
    fn check_quadrature(&self) -> Result<()> {
        let n = self.dimension();
        for i in 0..n {
            for j in 0..=i {
                let (full, half) = self.rule.means(|k, z| z.powi(i as i32) * z.powi(j as i32).conj() * self.weights[k]);
                let change = (full - half).norm();
                if change > 1e-12 * full.norm().max(1.0) {
                    return Err(Error::QuadratureNotConverged { change });
                }
            }
        }
        Ok(())
    }

    /// Checks the coefficient form of `C_θ` against `θ(ζ)·conj(ζ f(ζ))` at 200
    /// boundary points for each monomial element.
    fn check_conjugation(&self) -> Result<()> {
        let n = self.dimension();
        for k in 0..n {
            let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
            coeffs[k] = Complex64::new(1.0, 0.0);
            let f = self.element(coeffs)?;
            let cf = f.conjugate();
            for m in 0..200 {
                // golden-angle points avoid any structure in θ
                let zeta = Complex64::from_polar(1.0, 2.399_963_229_728_653 * m as f64 + 0.5);
                let direct = self.theta.eval(zeta)? * (zeta * f.eval(zeta)?).conj();
                let defect = (direct - cf.eval(zeta)?).norm();
                if defect > 1e-10 * direct.norm().max(1.0) {
                    return Err(Error::Precondition(format!(
                        "coefficient conjugation disagrees with the boundary formula by {defect:.3e}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn theta(&self) -> &Arc<BlaschkeProduct> {
        &self.theta
    }

    pub fn config(&self) -> &NumericConfig {
        &self.config
    }

    pub fn rule(&self) -> &CircleRule {
        &self.rule
    }

    pub fn dimension(&self) -> usize {
        self.theta.order()
    }

    pub fn element(&self, numerator: Vec<Complex64>) -> Result<KThetaElement> {
        KThetaElement::new(Arc::clone(&self.theta), numerator)
    }

    fn check(&self, f: &KThetaElement) -> Result<()> {
        if same_theta(&self.theta, &f.theta) {
            Ok(())
        } else {
            Err(Error::ThetaMismatch)
        }
    }

    /// `⟨f, g⟩ = (1/2π)∮ f·conj(g)`, linear in `f`.
    pub fn inner(&self, f: &KThetaElement, g: &KThetaElement) -> Result<Complex64> {
        self.check(f)?;
        self.check(g)?;
        self.rule.mean_checked(self.config.quadrature_tol, |k, z| {
            poly::eval(&f.numerator, z) * poly::eval(&g.numerator, z).conj() * self.weights[k]
        })
    }

    pub fn norm(&self, f: &KThetaElement) -> Result<f64> {
        Ok(self.inner(f, f)?.re.max(0.0).sqrt())
    }

    /// `⟨φ f, g⟩` for a boundary function `φ`.
    pub fn pairing_with<F>(&self, symbol: F, f: &KThetaElement, g: &KThetaElement) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Complex64,
    {
        self.check(f)?;
        self.check(g)?;
        self.rule.mean_checked(self.config.quadrature_tol, |k, z| {
            symbol(z) * poly::eval(&f.numerator, z) * poly::eval(&g.numerator, z).conj() * self.weights[k]
        })
    }

    /// Gram matrix with entry `(i, j) = ⟨eⱼ, eᵢ⟩`.
    pub fn gram(&self, elements: &[KThetaElement]) -> Result<DMatrix<Complex64>> {
        let n = elements.len();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = self.inner(&elements[j], &elements[i])?;
            }
        }
        Ok(g)
    }

    /// Reproducing kernel `k_λ(z) = (1 − conj(θ(λ))θ(z))/(1 − λ̄z)` for `|λ| ≤ 1`.
    pub fn kernel(&self, lambda: Complex64) -> Result<KThetaElement> {
        if lambda.norm() > 1.0 + 1e-12 {
            return Err(Error::Precondition(format!("kernel point {lambda} lies outside the closed disc")));
        }
        let theta_l = self.theta.eval(lambda)?;
        let scaled_numerator: Vec<Complex64> =
            self.theta.numerator_poly().iter().map(|a| a * self.theta.constant()).collect();
        let top = poly::axpy(&self.theta.denominator_poly(), -theta_l.conj(), &scaled_numerator);
        let (quotient, remainder) = poly::divide_by_one_minus(&top, lambda.conj());
        let scale = top.iter().map(|a| a.norm()).fold(1.0, f64::max);
        if remainder.norm() >= 1e-10 * scale {
            return Err(Error::DivisionRemainder { remainder: remainder.norm() });
        }
        self.element(quotient)
    }

    /// Validates orthonormality and wraps the elements.
    pub fn orthonormal_basis(
        &self,
        elements: Vec<KThetaElement>,
        label: impl Into<String>,
    ) -> Result<OrthonormalBasis> {
        if elements.len() != self.dimension() {
            return Err(Error::Precondition(format!(
                "a basis needs {} elements, got {}",
                self.dimension(),
                elements.len()
            )));
        }
        let gram_residual = gram_residual(&self.gram(&elements)?);
        if !(gram_residual < ORTHONORMAL_TOL) {
            return Err(Error::NotOrthonormal(gram_residual));
        }
        Ok(OrthonormalBasis { elements, gram_residual, label: label.into() })
    }

    /// Gram–Schmidt (two passes) on `zᵏ/D(z)`, `k = 0..n`.
    pub fn reference_onb(&self) -> Result<OrthonormalBasis> {
        let n = self.dimension();
        let mut out: Vec<KThetaElement> = Vec::with_capacity(n);
        for k in 0..n {
            let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
            coeffs[k] = Complex64::new(1.0, 0.0);
            let mut f = self.element(coeffs)?;
            for _ in 0..2 {
                for v in &out {
                    let proj = self.inner(&f, v)?;
                    f = KThetaElement::combination(&[(Complex64::new(1.0, 0.0), &f), (-proj, v)])?;
                }
            }
            let norm = self.norm(&f)?;
            out.push(f.scale(Complex64::new(1.0 / norm, 0.0)));
        }
        self.orthonormal_basis(out, "reference")
    }

    /// Coordinates `⟨f, vᵢ⟩` of `f` in an orthonormal basis.
    pub fn coordinates(&self, f: &KThetaElement, basis: &OrthonormalBasis) -> Result<Vec<Complex64>> {
        basis.elements().iter().map(|v| self.inner(f, v)).collect()
    }
}

/// `‖G − I‖_F`.
pub fn gram_residual(g: &DMatrix<Complex64>) -> f64 {
    let n = g.nrows();
    (g - DMatrix::<Complex64>::identity(n, n)).norm()
}

//! Modified Clark bases: eigenvectors of the unitary rank-one perturbation
//! `U_{t,α}` of the compressed Möbius shift, supported on boundary kernels
//! over the level set `θ(η) = ω`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::modelspace::{KThetaElement, ModelSpace, OrthonormalBasis};

/// Tolerance for the `C_θ`-reality and off-diagonal vanishing invariants.
pub const CLARK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClarkParams {
    pub t: Complex64,
    pub alpha: Complex64,
}

impl Default for ClarkParams {
    fn default() -> Self {
        ClarkParams { t: Complex64::new(0.0, 0.0), alpha: Complex64::new(1.0, 0.0) }
    }
}

impl ClarkParams {
    pub fn new(t: Complex64, alpha: Complex64) -> Result<Self> {
        if !(t.norm() < 1.0) {
            return Err(Error::Precondition(format!("Clark parameter t = {t} must lie in the open disc")));
        }
        if !((alpha.norm() - 1.0).abs() < 1e-12) {
            return Err(Error::Precondition(format!("Clark parameter α = {alpha} must be unimodular")));
        }
        Ok(ClarkParams { t, alpha })
    }
}

/// `ω = (α + θ(t))/(1 + conj(θ(t))·α)`.
pub fn clark_target(theta: &BlaschkeProduct, params: &ClarkParams) -> Result<Complex64> {
    let at_t = theta.eval(params.t)?;
    let den = 1.0 + at_t.conj() * params.alpha;
    if den.norm() < 1e-12 {
        return Err(Error::DegenerateClark(den.norm()));
    }
    let omega = (params.alpha + at_t) / den;
    Ok(omega / omega.norm())
}

fn arg_in_circle(z: Complex64) -> f64 {
    let a = z.arg().rem_euclid(TAU);
    if TAU - a < 1e-14 {
        0.0
    } else {
        a
    }
}

/// `exp(i(δ₁+δ₂)/2)` with `δ₁ = arg(η̄)` and `δ₂ = arg(ω)`, both in `[0, 2π)`:
/// the square root of `η̄·ω` on the branch used for Clark bases.
pub fn clark_phase(eta: Complex64, omega: Complex64) -> Complex64 {
    let d1 = arg_in_circle(eta.conj());
    let d2 = arg_in_circle(omega);
    Complex64::from_polar(1.0, 0.5 * (d1 + d2))
}

/// `η̄^{1/2}` with argument `γ/2`, `γ = arg(η̄) ∈ [0, 2π)`.
pub fn conj_sqrt(eta: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, 0.5 * arg_in_circle(eta.conj()))
}

#[derive(Clone, Debug)]
pub struct ClarkBasis {
    pub params: ClarkParams,
    /// Common value `θ(ηᵢ)`.
    pub omega: Complex64,
    /// Level-set points sorted by argument in `[0, 2π)`.
    pub etas: [Complex64; 3],
    /// Unimodular square roots `(η̄ᵢ ω)^{1/2}`.
    pub phases: [Complex64; 3],
    /// `‖k_{ηᵢ}‖`.
    pub norms: [f64; 3],
    /// `cbᵢ = phaseᵢ · k_{ηᵢ}/‖k_{ηᵢ}‖`.
    pub basis: OrthonormalBasis,
}

impl ClarkBasis {
    /// `bᵢ` with `cbᵢ = bᵢ·k_{ηᵢ}`.
    pub fn coefficients(&self) -> [Complex64; 3] {
        [0, 1, 2].map(|i| self.phases[i] / self.norms[i])
    }

    pub fn elements(&self) -> &[KThetaElement] {
        self.basis.elements()
    }

    /// Same basis with the other square-root branch for element `index`.
    pub fn with_negated_phase(&self, space: &ModelSpace, index: usize) -> Result<ClarkBasis> {
        let mut phases = self.phases;
        phases[index] = -phases[index];
        assemble(space, self.params, self.omega, self.etas, phases)
    }
}

impl ModelSpace {
    /// The modified Clark basis for parameters `(t, α)` on an order-3 space.
    pub fn modified_clark_basis(&self, params: &ClarkParams) -> Result<ClarkBasis> {
        if self.dimension() != 3 {
            return Err(Error::Precondition(format!(
                "Clark bases are assembled for order 3 only, got order {}",
                self.dimension()
            )));
        }
        let omega = clark_target(self.theta(), params)?;
        let level = self.theta().level_set(omega, self.config())?;
        let etas = [level[0], level[1], level[2]];
        let phases = etas.map(|eta| clark_phase(eta, omega));
        assemble(self, *params, omega, etas, phases)
    }

    /// Matrix of `U_{t,α} = S_t + γ·(k_t ⊗ C_θ k_t)` in `basis`, entry
    /// `(i, j) = ⟨U vⱼ, vᵢ⟩`, where `S_t` compresses multiplication by
    /// `(z − t)/(1 − t̄z)` and `γ = (α + θ(t))(1 − |t|²)/(1 − |θ(t)|²)`.
    pub fn clark_operator_matrix(&self, params: &ClarkParams, basis: &OrthonormalBasis) -> Result<DMatrix<Complex64>> {
        let t = params.t;
        let at_t = self.theta().eval(t)?;
        let gamma = (params.alpha + at_t) * (1.0 - t.norm_sqr()) / (1.0 - at_t.norm_sqr());
        let k_t = self.kernel(t)?;
        let ck_t = k_t.conjugate();
        let mobius = move |z: Complex64| (z - t) / (1.0 - t.conj() * z);
        let v = basis.elements();
        let n = v.len();
        let left: Vec<Complex64> = v.iter().map(|vj| self.inner(vj, &ck_t)).collect::<Result<_>>()?;
        let right: Vec<Complex64> = v.iter().map(|vi| self.inner(&k_t, vi)).collect::<Result<_>>()?;
        let mut u = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                u[(i, j)] = self.pairing_with(mobius, &v[j], &v[i])? + gamma * left[j] * right[i];
            }
        }
        Ok(u)
    }
}

fn assemble(
    space: &ModelSpace,
    params: ClarkParams,
    omega: Complex64,
    etas: [Complex64; 3],
    phases: [Complex64; 3],
) -> Result<ClarkBasis> {
    let mut norms = [0.0; 3];
    let mut elements = Vec::with_capacity(3);
    for i in 0..3 {
        norms[i] = space.theta().boundary_kernel_norm_sq(etas[i])?.sqrt();
        let k = space.kernel(etas[i])?;
        elements.push(k.scale(phases[i] / norms[i]));
    }
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let v = elements[i].eval(etas[j])?.norm();
                if v >= CLARK_TOL {
                    return Err(Error::ClarkInvariant(format!("cb_{}(η_{}) = {v:.3e}", i + 1, j + 1)));
                }
            }
        }
    }
    let basis = space.orthonormal_basis(elements, "clark")?;
    basis.require_c_real(space, CLARK_TOL)?;
    Ok(ClarkBasis { params, omega, etas, phases, norms, basis })
}

//! Truncated Toeplitz operators `A_φ f = P_θ(φ f)` as matrices, and the
//! rank-one operators that span `T_θ` in dimension three.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modelspace::{ModelSpace, OrthonormalBasis};
use crate::random;

/// Interior point paired with `λ₄ = 0` in the default generator set.
pub const DEFAULT_INTERIOR_POINT: Complex64 = Complex64::new(0.41, 0.13);

/// Trigonometric polynomial `φ(z) = Σ c_k z^k` on the circle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Symbol {
    coeffs: BTreeMap<i32, Complex64>,
}

impl Symbol {
    pub fn new(coeffs: BTreeMap<i32, Complex64>) -> Self {
        Symbol { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(k: i32, c: Complex64) -> Self {
        Symbol { coeffs: BTreeMap::from([(k, c)]) }
    }

    /// Taylor polynomial of `(z − t)/(1 − t̄z)` through `z^degree`.
    pub fn mobius(t: Complex64, degree: i32) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0, -t);
        let scale = 1.0 - t.norm_sqr();
        let mut power = Complex64::new(1.0, 0.0);
        for k in 1..=degree {
            coeffs.insert(k, scale * power);
            power *= t.conj();
        }
        Symbol { coeffs }
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, Complex64> {
        &self.coeffs
    }

    /// Value at a unimodular point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().map(|(&k, &c)| c * z.powi(k)).sum()
    }
}

/// Matrix of an operator on `K_θ` with entry `(i, j) = ⟨A vⱼ, vᵢ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct TtoMatrix {
    pub entries: DMatrix<Complex64>,
    pub basis_tag: String,
}

impl TtoMatrix {
    /// `‖S − Sᵀ‖_F` (transpose, not adjoint).
    pub fn symmetry_defect(&self) -> f64 {
        (&self.entries - self.entries.transpose()).norm()
    }

    /// `Σ μᵢ Gᵢ`.
    pub fn combination(mu: &[Complex64], generators: &[TtoMatrix]) -> Result<TtoMatrix> {
        let first = generators.first().ok_or_else(|| Error::Precondition("no generators".into()))?;
        if mu.len() != generators.len() {
            return Err(Error::Precondition("coefficient count does not match generators".into()));
        }
        let mut entries = DMatrix::zeros(first.entries.nrows(), first.entries.ncols());
        for (m, g) in mu.iter().zip(generators) {
            entries += &g.entries * *m;
        }
        Ok(TtoMatrix { entries, basis_tag: first.basis_tag.clone() })
    }
}

/// Three boundary points and two interior points for the generator set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointConfig {
    pub boundary: [Complex64; 3],
    pub interior: [Complex64; 2],
}

impl PointConfig {
    pub fn new(boundary: [Complex64; 3], interior: [Complex64; 2]) -> Result<Self> {
        for t in boundary {
            if (t.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::Precondition(format!("boundary point {t} is not unimodular")));
            }
        }
        for l in interior {
            if !(l.norm() < 1.0) {
                return Err(Error::Precondition(format!("interior point {l} is not in the open disc")));
            }
        }
        let gap = |a: Complex64, b: Complex64| (a - b).norm();
        let boundary_gap =
            gap(boundary[0], boundary[1]).min(gap(boundary[0], boundary[2])).min(gap(boundary[1], boundary[2]));
        if boundary_gap <= 1e-8 {
            return Err(Error::Precondition(format!("boundary points not distinct (gap {boundary_gap:.3e})")));
        }
        let interior_gap = gap(interior[0], interior[1]);
        if interior_gap <= 1e-8 {
            return Err(Error::Precondition(format!("interior points not distinct (gap {interior_gap:.3e})")));
        }
        Ok(PointConfig { boundary, interior })
    }

    /// `(η₁, η₂, η₃; 0, 0.41 + 0.13i)`.
    pub fn with_boundary(etas: [Complex64; 3]) -> Result<Self> {
        Self::new(etas, [Complex64::new(0.0, 0.0), DEFAULT_INTERIOR_POINT])
    }

    /// Default configuration built on the level set `θ = 1`.
    pub fn default_for(space: &ModelSpace) -> Result<Self> {
        let etas = space.theta().level_set(Complex64::new(1.0, 0.0), space.config())?;
        if etas.len() != 3 {
            return Err(Error::Precondition("point configurations need an order-3 space".into()));
        }
        Self::with_boundary([etas[0], etas[1], etas[2]])
    }
}

impl ModelSpace {
    /// `[A_φ]` in `basis`, entries `⟨φ vⱼ, vᵢ⟩` by circle quadrature.
    pub fn tto_matrix(&self, symbol: &Symbol, basis: &OrthonormalBasis) -> Result<TtoMatrix> {
        let v = basis.elements();
        let n = v.len();
        let mut entries = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                entries[(i, j)] = self.pairing_with(|z| symbol.eval(z), &v[j], &v[i])?;
            }
        }
        Ok(TtoMatrix { entries, basis_tag: basis.label().to_owned() })
    }

    /// `[k_t ⊗ k_t]`, entry `(i, j) = vⱼ(t)·conj(vᵢ(t))`.
    pub fn rank_one_boundary(&self, t: Complex64, basis: &OrthonormalBasis) -> Result<TtoMatrix> {
        if t.norm() > 1.0 + 1e-10 {
            return Err(Error::Precondition(format!("{t} lies outside the closed disc")));
        }
        let values = basis.eval_all(t)?;
        let n = values.len();
        let entries = DMatrix::from_fn(n, n, |i, j| values[j] * values[i].conj());
        Ok(TtoMatrix { entries, basis_tag: basis.label().to_owned() })
    }

    /// `[k_λ ⊗ C_θk_λ]`, entry `(i, j) = ⟨vⱼ, C_θk_λ⟩·⟨k_λ, vᵢ⟩`.
    pub fn rank_one_conjugate(&self, lambda: Complex64, basis: &OrthonormalBasis) -> Result<TtoMatrix> {
        if !(lambda.norm() < 1.0) {
            return Err(Error::Precondition(format!("{lambda} is not in the open disc")));
        }
        let k = self.kernel(lambda)?;
        let ck = k.conjugate();
        let v = basis.elements();
        let left: Vec<Complex64> = v.iter().map(|vj| self.inner(vj, &ck)).collect::<Result<_>>()?;
        let right: Vec<Complex64> = v.iter().map(|vi| self.inner(&k, vi)).collect::<Result<_>>()?;
        let n = v.len();
        let entries = DMatrix::from_fn(n, n, |i, j| left[j] * right[i]);
        Ok(TtoMatrix { entries, basis_tag: basis.label().to_owned() })
    }

    /// `k_{tᵢ} ⊗ k_{tᵢ}` for the boundary points, then `k_{λᵢ} ⊗ C_θk_{λᵢ}` for
    /// the interior points.
    pub fn tto_generators(&self, points: &PointConfig, basis: &OrthonormalBasis) -> Result<Vec<TtoMatrix>> {
        let mut out = Vec::with_capacity(5);
        for &t in &points.boundary {
            out.push(self.rank_one_boundary(t, basis)?);
        }
        for &l in &points.interior {
            out.push(self.rank_one_conjugate(l, basis)?);
        }
        Ok(out)
    }

    /// Random `Σ μᵢ Gᵢ` over the generators of [`PointConfig::default_for`].
    pub fn random_tto(&self, basis: &OrthonormalBasis, seed: u64) -> Result<([Complex64; 5], TtoMatrix)> {
        let points = PointConfig::default_for(self)?;
        let generators = self.tto_generators(&points, basis)?;
        let mut rng = random::rng(seed);
        let mu: [Complex64; 5] = std::array::from_fn(|_| random::complex(&mut rng));
        Ok((mu, TtoMatrix::combination(&mu, &generators)?))
    }
}

/// Singular values (descending) of the matrix whose columns are the
/// vectorized operators.
pub fn vectorized_singular_values(matrices: &[TtoMatrix]) -> Vec<f64> {
    if matrices.is_empty() {
        return Vec::new();
    }
    let rows = matrices[0].entries.len();
    let stacked = DMatrix::from_fn(rows, matrices.len(), |r, c| matrices[c].entries[r]);
    let mut sv: Vec<f64> = stacked.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::BlaschkeProduct;
    use crate::clark::ClarkParams;
    use crate::config::NumericConfig;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cis(a: f64) -> Complex64 {
        Complex64::from_polar(1.0, a)
    }

    fn monomial_space() -> ModelSpace {
        ModelSpace::new(BlaschkeProduct::monomial(3).unwrap(), NumericConfig::default()).unwrap()
    }

    #[test]
    fn identity_and_shift_on_monomials() {
        let s = monomial_space();
        let onb = s.reference_onb().unwrap();
        let id = s.tto_matrix(&Symbol::constant(c(1.0, 0.0)), &onb).unwrap();
        assert!((id.entries.clone() - DMatrix::<Complex64>::identity(3, 3)).norm() < 1e-12);
        let shift = s.tto_matrix(&Symbol::monomial(1, c(1.0, 0.0)), &onb).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j + 1 { 1.0 } else { 0.0 };
                assert!((shift.entries[(i, j)] - want).norm() < 1e-12);
            }
        }
    }

    /// `⟨z k_{ηⱼ}, k_{ηᵢ}⟩ = ηᵢ + ηᵢ² conj(ηⱼ)` for `θ = z³`, scaled by the
    /// Clark coefficients.
    #[test]
    fn shift_in_f1_clark_basis_matches_hand_computation() {
        let s = monomial_space();
        let cb = s.modified_clark_basis(&ClarkParams::default()).unwrap();
        let a = s.tto_matrix(&Symbol::monomial(1, c(1.0, 0.0)), &cb.basis).unwrap();
        let b = cb.coefficients();
        let eta = cb.etas;
        for i in 0..3 {
            for j in 0..3 {
                let hand = b[j] * b[i].conj() * (eta[i] + eta[i] * eta[i] * eta[j].conj());
                assert!((a.entries[(i, j)] - hand).norm() < 1e-10);
            }
        }
        let want = [
            ((0, 0), c(2.0 / 3.0, 0.0)),
            ((1, 1), 2.0 * cis(2.0 * PI / 3.0) / 3.0),
            ((2, 2), 2.0 * cis(4.0 * PI / 3.0) / 3.0),
            ((0, 1), cis(PI / 3.0) / 3.0),
            ((0, 2), cis(2.0 * PI / 3.0) / 3.0),
            ((1, 2), c(1.0 / 3.0, 0.0)),
        ];
        for ((i, j), w) in want {
            assert!((a.entries[(i, j)] - w).norm() < 1e-10, "({i},{j}) {} vs {w}", a.entries[(i, j)]);
            assert!((a.entries[(j, i)] - w).norm() < 1e-10);
        }
    }

    #[test]
    fn rank_one_boundary_examples() {
        let s = monomial_space();
        let onb = s.reference_onb().unwrap();
        let m = s.rank_one_boundary(c(1.0, 0.0), &onb).unwrap();
        assert!(m.entries.iter().all(|e| (e - 1.0).norm() < 1e-12));
        let cb = s.modified_clark_basis(&ClarkParams::default()).unwrap();
        let m = s.rank_one_boundary(c(1.0, 0.0), &cb.basis).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == 0 && j == 0 { 3.0 } else { 0.0 };
                assert!((m.entries[(i, j)] - want).norm() < 1e-10);
            }
        }
        let sv = vectorized_singular_values(std::slice::from_ref(&m));
        assert_eq!(sv.len(), 1);
        let full = m.entries.singular_values();
        let mut full: Vec<f64> = full.iter().copied().collect();
        full.sort_by(|a, b| b.total_cmp(a));
        assert!(full[1] < 1e-10);
    }

    #[test]
    fn rank_one_conjugate_examples() {
        let s = monomial_space();
        let onb = s.reference_onb().unwrap();
        // k_0 = 1 and C_θ k_0 = z², so only ⟨v₃, z²⟩⟨1, v₁⟩ survives.
        let m = s.rank_one_conjugate(c(0.0, 0.0), &onb).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == 0 && j == 2 { 1.0 } else { 0.0 };
                assert!((m.entries[(i, j)] - want).norm() < 1e-12, "({i},{j})");
            }
        }
        let cb = s.modified_clark_basis(&ClarkParams::default()).unwrap();
        let m = s.rank_one_conjugate(c(0.0, 0.0), &cb.basis).unwrap();
        let at0 = cb.basis.eval_all(c(0.0, 0.0)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = at0[i].conj() * at0[j].conj();
                assert!((m.entries[(i, j)] - want).norm() < 1e-12);
            }
        }
        assert!(m.symmetry_defect() < 1e-12);
    }

    #[test]
    fn generators_span_five_dimensions_and_contain_identity() {
        let s = monomial_space();
        let cb = s.modified_clark_basis(&ClarkParams::default()).unwrap();
        let points = PointConfig::with_boundary(cb.etas).unwrap();
        let mut gens = s.tto_generators(&points, &cb.basis).unwrap();
        let sv = vectorized_singular_values(&gens);
        assert!(sv[4] > 1e-8 * sv[0], "{sv:?}");

        let stacked = DMatrix::from_fn(9, 5, |r, c| gens[c].entries[r]);
        let target = DMatrix::<Complex64>::identity(3, 3);
        let rhs = nalgebra::DVector::from_iterator(9, target.iter().copied());
        let mu = stacked.clone().svd(true, true).solve(&rhs, 1e-14).unwrap();
        assert!((&stacked * mu - rhs).norm() < 1e-9);

        gens.push(s.rank_one_boundary(cis(0.3), &cb.basis).unwrap());
        let sv = vectorized_singular_values(&gens);
        assert!(sv[5] < 1e-10 * sv[0], "{sv:?}");
    }

    #[test]
    fn point_config_rejects_coincident_points() {
        let one = c(1.0, 0.0);
        assert!(PointConfig::new([one, one, c(-1.0, 0.0)], [c(0.0, 0.0), c(0.1, 0.0)]).is_err());
        assert!(PointConfig::new([one, c(0.0, 1.0), c(-1.0, 0.0)], [c(0.1, 0.0), c(0.1, 0.0)]).is_err());
        assert!(PointConfig::new([one, c(0.0, 1.0), c(-1.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn random_tto_is_deterministic_and_symmetric() {
        let s = monomial_space();
        let cb = s.modified_clark_basis(&ClarkParams::default()).unwrap();
        let (mu1, a1) = s.random_tto(&cb.basis, 7).unwrap();
        let (mu2, a2) = s.random_tto(&cb.basis, 7).unwrap();
        assert_eq!(mu1, mu2);
        assert_eq!(a1, a2);
        assert!(a1.symmetry_defect() < 1e-8);
        let points = PointConfig::default_for(&s).unwrap();
        let gens = s.tto_generators(&points, &cb.basis).unwrap();
        let mut unit = [c(0.0, 0.0); 5];
        unit[0] = c(1.0, 0.0);
        let first = TtoMatrix::combination(&unit, &gens).unwrap();
        assert!((first.entries - &gens[0].entries).norm() < 1e-15);
    }

    #[test]
    fn mobius_symbol_matches_closed_form() {
        let t = c(0.3, -0.2);
        let sym = Symbol::mobius(t, 80);
        for k in 0..5 {
            let z = cis(1.3 * k as f64);
            let want = (z - t) / (1.0 - t.conj() * z);
            assert!((sym.eval(z) - want).norm() < 1e-14);
        }
    }
}

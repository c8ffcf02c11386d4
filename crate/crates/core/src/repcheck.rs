//! Decision procedures for a fixed basis of a three-dimensional `K_θ`.
//!
//! * [`ModelSpace::detthm_test`] works for any `C_θ`-real basis: `S` is the
//!   matrix of a TTO iff its stacked entries lie in the span of the five
//!   rank-one generator columns, i.e. iff the 6×6 determinant vanishes. A
//!   least-squares solve supplies the coefficients as a certificate.
//! * [`clark_s6_test`] specializes to modified Clark bases, where the span
//!   condition collapses to one linear relation fixing `s₆` from `s₄, s₅`.

use nalgebra::{DMatrix, DVector, Matrix3, SVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::clark::{conj_sqrt, ClarkBasis};
use crate::config::NumericConfig;
use crate::error::{Error, Result};
use crate::modelspace::{ModelSpace, OrthonormalBasis};
use crate::random;
use crate::so3::{self, OrthMatrix3};
use crate::tto::PointConfig;

/// Tolerance on `C_θ`-reality when a basis enters the determinant test.
pub const C_REAL_TOL: f64 = 1e-8;
/// `σ₅/σ₁` below which the generator columns are treated as dependent.
pub const CONDITIONING_FLOOR: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row order of the stacked vector: `(11), (22), (33), (12), (13), (23)`.
pub const STACK_ORDER: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

/// Complex symmetric 3×3 matrix
///
/// ```text
/// s1 s4 s5
/// s4 s2 s6
/// s5 s6 s3
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sym3 {
    pub s: [Complex64; 6],
}

impl Sym3 {
    pub fn new(s: [Complex64; 6]) -> Self {
        Sym3 { s }
    }

    pub fn from_real(s: [f64; 6]) -> Self {
        Sym3 { s: s.map(|x| Complex64::new(x, 0.0)) }
    }

    pub fn diagonal(d: [Complex64; 3]) -> Self {
        Sym3 { s: [d[0], d[1], d[2], ZERO, ZERO, ZERO] }
    }

    /// Symmetric part of a 3×3 matrix, `(M + Mᵀ)/2`.
    pub fn from_matrix(m: &Matrix3<Complex64>) -> Self {
        let avg = |i: usize, j: usize| (m[(i, j)] + m[(j, i)]) / 2.0;
        Sym3 { s: STACK_ORDER.map(|(i, j)| avg(i, j)) }
    }

    pub fn from_dmatrix(m: &DMatrix<Complex64>) -> Result<Self> {
        if m.shape() != (3, 3) {
            return Err(Error::Precondition(format!("expected a 3×3 matrix, got {:?}", m.shape())));
        }
        Ok(Self::from_matrix(&Matrix3::from_fn(|i, j| m[(i, j)])))
    }

    /// The matrices of the corollary: a real diagonal `(a, b, c)` with a
    /// single unit off-diagonal pair at (1,3), (1,2) or (2,3) for families
    /// 1, 2 and 3.
    pub fn corollary_family(family: u8, a: f64, b: f64, c: f64) -> Result<Self> {
        let mut s = [a, b, c, 0.0, 0.0, 0.0];
        match family {
            1 => s[4] = 1.0,
            2 => s[3] = 1.0,
            3 => s[5] = 1.0,
            _ => return Err(Error::Precondition(format!("family must be 1, 2 or 3, got {family}"))),
        }
        Ok(Self::from_real(s))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match (i.min(j), i.max(j)) {
            (0, 0) => self.s[0],
            (1, 1) => self.s[1],
            (2, 2) => self.s[2],
            (0, 1) => self.s[3],
            (0, 2) => self.s[4],
            (1, 2) => self.s[5],
            _ => panic!("index ({i}, {j}) out of range for a 3×3 matrix"),
        }
    }

    pub fn to_matrix(&self) -> Matrix3<Complex64> {
        Matrix3::from_fn(|i, j| self.get(i, j))
    }

    pub fn stacked(&self) -> SVector<Complex64, 6> {
        SVector::from(self.s)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.s.iter().all(|x| x.im.abs() <= tol)
    }

    /// `‖S S* − S* S‖_F`.
    pub fn normality_defect(&self) -> f64 {
        let m = self.to_matrix();
        let a = m.adjoint();
        (m * a - a * m).norm()
    }

    /// Frobenius distance between the full matrices.
    pub fn distance(&self, other: &Sym3) -> f64 {
        (self.to_matrix() - other.to_matrix()).norm()
    }
}

/// Coefficients `μ` over the five rank-one generators, with the
/// reconstruction they produce and its Frobenius distance from the input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub mu: [Complex64; 5],
    pub residual: f64,
    pub reconstructed: Sym3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetVerdict {
    pub is_rep: bool,
    pub certificate: Certificate,
    pub det: Complex64,
    /// `|det| / ∏ column norms`, the quantity compared against the tolerance.
    pub scaled_det: f64,
    /// `σ₅/σ₁` of the generator columns.
    pub conditioning: f64,
}

/// Which coefficients enter the Clark relation for `s₆`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Unimodular ratios `η̄₁^{1/2}/η̄ⱼ^{1/2}` only.
    Paper,
    /// Ratios `conj(bⱼ/b₁)` of the actual coefficients `cbᵢ = bᵢ k_{ηᵢ}`,
    /// which include the kernel norms.
    #[default]
    General,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Variant::Paper),
            "general" => Ok(Variant::General),
            other => Err(Error::InvalidConfig(format!("unknown variant {other:?}"))),
        }
    }
}

/// `(η₃ − η₂)·s₆ = k₄·s₄ + k₅·s₅` for a Clark basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClarkRelation {
    pub span: Complex64,
    pub k4: Complex64,
    pub k5: Complex64,
}

impl ClarkRelation {
    pub fn new(cb: &ClarkBasis, variant: Variant) -> Result<Self> {
        let [e1, e2, e3] = cb.etas;
        let span = e3 - e2;
        if span.norm() < 1e-12 {
            return Err(Error::Precondition("coincident level-set points".into()));
        }
        let (r13, r12) = match variant {
            Variant::Paper => (conj_sqrt(e1) / conj_sqrt(e3), conj_sqrt(e1) / conj_sqrt(e2)),
            Variant::General => {
                let b = cb.coefficients();
                ((b[2] / b[0]).conj(), (b[1] / b[0]).conj())
            }
        };
        Ok(ClarkRelation { span, k4: r13 * (e1 - e2), k5: r12 * (e3 - e1) })
    }

    pub fn predicted_s6(&self, s4: Complex64, s5: Complex64) -> Complex64 {
        (self.k4 * s4 + self.k5 * s5) / self.span
    }

    /// `(η₃ − η₂)·x₂₃ − k₄·x₁₂ − k₅·x₁₃`.
    pub fn residual(&self, x12: Complex64, x13: Complex64, x23: Complex64) -> Complex64 {
        self.span * x23 - self.k4 * x12 - self.k5 * x13
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct S6Verdict {
    pub is_rep: bool,
    pub predicted_s6: Complex64,
    pub gap: f64,
}

/// Clark-basis test: `S` represents a TTO iff `s₆` equals the value
/// predicted from `s₄, s₅`, within `tol·(1 + |s₆|)`.
pub fn clark_s6_test(s: &Sym3, cb: &ClarkBasis, variant: Variant, tol: f64) -> Result<S6Verdict> {
    let relation = ClarkRelation::new(cb, variant)?;
    let predicted_s6 = relation.predicted_s6(s.s[3], s.s[4]);
    let gap = (s.s[5] - predicted_s6).norm();
    Ok(S6Verdict { is_rep: gap < tol * (1.0 + s.s[5].norm()), predicted_s6, gap })
}

impl ModelSpace {
    /// Columns `c₁ … c₅` of the determinant test in [`STACK_ORDER`]:
    /// `v_a(tᵢ)·conj(v_b(tᵢ))` for boundary points and `conj(v_a(λᵢ)·v_b(λᵢ))`
    /// for interior points.
    pub fn build_columns(&self, basis: &OrthonormalBasis, points: &PointConfig) -> Result<[SVector<Complex64, 6>; 5]> {
        if basis.len() != 3 {
            return Err(Error::Precondition("the determinant test needs a three-dimensional basis".into()));
        }
        basis.require_c_real(self, C_REAL_TOL)?;
        let mut cols = [SVector::<Complex64, 6>::zeros(); 5];
        for (i, &t) in points.boundary.iter().enumerate() {
            let v = basis.eval_all(t)?;
            cols[i] = SVector::from(STACK_ORDER.map(|(a, b)| v[a] * v[b].conj()));
        }
        for (i, &l) in points.interior.iter().enumerate() {
            let v = basis.eval_all(l)?;
            cols[3 + i] = SVector::from(STACK_ORDER.map(|(a, b)| (v[a] * v[b]).conj()));
        }
        Ok(cols)
    }

    /// Determinant test for `S` in a `C_θ`-real basis, with a least-squares
    /// certificate.
    pub fn detthm_test(&self, s: &Sym3, basis: &OrthonormalBasis, points: &PointConfig) -> Result<DetVerdict> {
        let cols = self.build_columns(basis, points)?;
        let gens = DMatrix::from_fn(6, 5, |r, c| cols[c][r]);
        let svd = gens.clone().svd(true, true);
        let sv = &svd.singular_values;
        let (hi, lo) = sv.iter().fold((0.0_f64, f64::INFINITY), |(h, l), &x| (h.max(x), l.min(x)));
        let conditioning = if hi > 0.0 { lo / hi } else { 0.0 };
        if conditioning < CONDITIONING_FLOOR {
            return Err(Error::Indeterminate { ratio: conditioning });
        }

        let target = s.stacked();
        let mut full = DMatrix::<Complex64>::zeros(6, 6);
        full.view_mut((0, 0), (6, 5)).copy_from(&gens);
        full.set_column(5, &DVector::from_iterator(6, target.iter().copied()));
        let det = full.clone().lu().determinant();
        let scale: f64 = (0..6).map(|c| full.column(c).norm()).product();
        let target_norm = target.norm();
        let scaled_det = if target_norm == 0.0 { 0.0 } else { det.norm() / scale };

        let rhs = DVector::from_iterator(6, target.iter().copied());
        let mu_vec = svd.solve(&rhs, 0.0).map_err(|e| Error::Linalg(e.to_string()))?;
        let mu: [Complex64; 5] = std::array::from_fn(|i| mu_vec[i]);
        let recon = &gens * &mu_vec;
        let reconstructed = Sym3::new(std::array::from_fn(|i| recon[i]));
        let residual = reconstructed.distance(s);

        Ok(DetVerdict {
            is_rep: scaled_det < self.config().decision_tol,
            certificate: Certificate { mu, residual, reconstructed },
            det,
            scaled_det,
            conditioning,
        })
    }
}

/// Outcome of instantiating one corollary family and testing it against
/// random Clark bases.
#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleReport {
    pub family: u8,
    pub matrix: Sym3,
    pub normality_defect: f64,
    pub trials: usize,
    /// Trials in which the Clark relation rejected the matrix.
    pub clark_failures: usize,
    /// Smallest `|s₆ − predicted|` seen across trials.
    pub min_gap: f64,
    /// Orthogonal `U` diagonalizing the matrix, when it is real.
    pub orthogonal: Option<OrthMatrix3>,
    /// Clark-relation residual of `U S Uᵀ`, for the first sampled basis.
    pub relation_residual: Option<f64>,
}

impl CounterexampleReport {
    pub fn is_normal(&self) -> bool {
        self.normality_defect < 1e-12
    }

    pub fn fails_every_clark_basis(&self) -> bool {
        self.clark_failures == self.trials
    }
}

/// A random modified Clark basis on a random order-3 space.
///
/// Draws are repeated (same stream) when a sample lands on a numerically
/// degenerate configuration.
pub fn random_clark_basis(seed: u64, index: u64, config: NumericConfig) -> Result<(ModelSpace, ClarkBasis)> {
    let mut rng = random::substream(seed, index);
    let mut last = None;
    for _ in 0..16 {
        let theta: BlaschkeProduct = random::blaschke(&mut rng, 3);
        let params = random::clark_params(&mut rng);
        let space = ModelSpace::new(theta, config)?;
        match space.modified_clark_basis(&params) {
            Ok(cb) => return Ok((space, cb)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt was made"))
}

/// Runs one family of the corollary against `trials` random Clark bases.
pub fn counterexample_report(
    family: u8,
    (a, b, c): (f64, f64, f64),
    trials: usize,
    seed: u64,
    config: NumericConfig,
) -> Result<CounterexampleReport> {
    let matrix = Sym3::corollary_family(family, a, b, c)?;
    let orthogonal = so3::spectral_shortcut(&matrix);
    let mut clark_failures = 0;
    let mut min_gap = f64::INFINITY;
    let mut relation_residual = None;
    for trial in 0..trials {
        let (_, cb) = random_clark_basis(seed, trial as u64, config)?;
        let verdict = clark_s6_test(&matrix, &cb, Variant::General, config.decision_tol)?;
        if !verdict.is_rep {
            clark_failures += 1;
        }
        min_gap = min_gap.min(verdict.gap);
        if relation_residual.is_none() {
            if let Some(u) = &orthogonal {
                relation_residual = Some(so3::residuals(&matrix, u, &cb, Variant::General)?.relation);
            }
        }
    }
    Ok(CounterexampleReport {
        family,
        matrix,
        normality_defect: matrix.normality_defect(),
        trials,
        clark_failures,
        min_gap,
        orthogonal,
        relation_residual,
    })
}

/// Re-derives the predicted `s₆` by expanding the lower-right 3×3 block of the
/// determinant test with `t = η` and `λ₄ = 0`, `λ₅ = λ`.
#[cfg(test)]
fn s6_by_block_expansion(
    space: &ModelSpace,
    cb: &ClarkBasis,
    lambda: Complex64,
    s4: Complex64,
    s5: Complex64,
) -> Result<Complex64> {
    let theta = space.theta();
    let b = cb.coefficients();
    let eta = cb.etas;
    let at_eta = theta.eval(eta[0])?;
    let big_b = |l: Complex64| -> Result<Complex64> { Ok(1.0 - theta.eval(l)?.conj() * at_eta) };
    let b0 = big_b(ZERO)?;
    let bl = big_b(lambda)?;
    let den = |i: usize| 1.0 - lambda.conj() * eta[i];
    let cc = |i: usize, j: usize| (b[i] * b[j]).conj();

    let x4 = cc(1, 0) * b0 * b0;
    let x5 = cc(2, 0) * b0 * b0;
    let x6 = cc(2, 1) * b0 * b0;
    let y4 = cc(1, 0) * bl * bl / (den(1) * den(0));
    let y5 = cc(2, 0) * bl * bl / (den(2) * den(0));
    let y6 = cc(2, 1) * bl * bl / (den(2) * den(1));

    // Same entries straight from kernel evaluations.
    let k0 = space.kernel(ZERO)?;
    let kl = space.kernel(lambda)?;
    let direct = |k: &crate::modelspace::KThetaElement, i: usize, j: usize| -> Result<Complex64> {
        Ok(b[i].conj() * k.eval(eta[i])? * b[j].conj() * k.eval(eta[j])?)
    };
    for (closed, i, j, k) in
        [(x4, 1, 0, &k0), (x5, 2, 0, &k0), (x6, 2, 1, &k0), (y4, 1, 0, &kl), (y5, 2, 0, &kl), (y6, 2, 1, &kl)]
    {
        let d = direct(k, i, j)?;
        assert!((closed - d).norm() < 1e-9 * (1.0 + d.norm()), "closed form {closed} vs direct {d}");
    }

    let denom = x4 * y5 - y4 * x5;
    Ok((s4 * (y5 * x6 - x5 * y6) + s5 * (x4 * y6 - y4 * x6)) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clark::ClarkParams;
    use crate::tto::Symbol;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cis(a: f64) -> Complex64 {
        Complex64::from_polar(1.0, a)
    }

    fn f1() -> (ModelSpace, ClarkBasis) {
        let space = ModelSpace::new(BlaschkeProduct::monomial(3).unwrap(), NumericConfig::default()).unwrap();
        let cb = space.modified_clark_basis(&ClarkParams::default()).unwrap();
        (space, cb)
    }

    fn f1_shift() -> Sym3 {
        Sym3::new([
            c(2.0 / 3.0, 0.0),
            2.0 * cis(2.0 * PI / 3.0) / 3.0,
            2.0 * cis(4.0 * PI / 3.0) / 3.0,
            cis(PI / 3.0) / 3.0,
            cis(2.0 * PI / 3.0) / 3.0,
            c(1.0 / 3.0, 0.0),
        ])
    }

    #[test]
    fn boundary_columns_on_clark_basis_are_single_entry() {
        let (space, cb) = f1();
        let points = PointConfig::with_boundary(cb.etas).unwrap();
        let cols = space.build_columns(&cb.basis, &points).unwrap();
        for (i, col) in cols.iter().take(3).enumerate() {
            for (r, x) in col.iter().enumerate() {
                if r == i {
                    assert!((x - 3.0).norm() < 1e-10, "diagonal entry {x}");
                } else {
                    assert!(x.norm() < 1e-10);
                }
            }
        }
        let at0 = cb.basis.eval_all(c(0.0, 0.0)).unwrap();
        for (r, (a, b)) in STACK_ORDER.iter().enumerate() {
            assert!((cols[3][r] - (at0[*a] * at0[*b]).conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn columns_match_vectorized_rank_one_matrices() {
        let (space, cb) = f1();
        let rot = OrthMatrix3::from_scaled_axis([0.3, -1.1, 0.4]);
        let basis = so3::creal_basis_from_orthogonal(&space, &cb, &rot).unwrap();
        let points = PointConfig::default_for(&space).unwrap();
        let cols = space.build_columns(&basis, &points).unwrap();
        let gens = space.tto_generators(&points, &basis).unwrap();
        for (col, g) in cols.iter().zip(&gens) {
            for (r, (i, j)) in STACK_ORDER.iter().enumerate() {
                assert!((col[r] - g.entries[(*j, *i)]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn non_c_real_basis_rejected() {
        let space = ModelSpace::new(
            BlaschkeProduct::new(vec![c(0.5, 0.0), c(0.0, 0.0), c(-0.5, 0.0)], c(1.0, 0.0)).unwrap(),
            NumericConfig::default(),
        )
        .unwrap();
        let onb = space.reference_onb().unwrap();
        let points = PointConfig::default_for(&space).unwrap();
        assert!(matches!(space.build_columns(&onb, &points), Err(Error::NotCReal { .. })));
    }

    #[test]
    fn detthm_examples_on_f1() {
        let (space, cb) = f1();
        let points = PointConfig::with_boundary(cb.etas).unwrap();
        let id = Sym3::diagonal([c(1.0, 0.0); 3]);
        let v = space.detthm_test(&id, &cb.basis, &points).unwrap();
        assert!(v.is_rep);
        assert!(v.certificate.residual < 1e-8);

        let shift = space.tto_matrix(&Symbol::monomial(1, c(1.0, 0.0)), &cb.basis).unwrap();
        let shift = Sym3::from_dmatrix(&shift.entries).unwrap();
        assert!(shift.distance(&f1_shift()) < 1e-10);
        let v = space.detthm_test(&shift, &cb.basis, &points).unwrap();
        assert!(v.is_rep && v.scaled_det < 1e-12, "{}", v.scaled_det);

        let lone = Sym3::new([ZERO, ZERO, ZERO, ZERO, ZERO, c(1.0, 0.0)]);
        let v = space.detthm_test(&lone, &cb.basis, &points).unwrap();
        assert!(!v.is_rep);
        assert!(v.certificate.residual > 1e-3);
    }

    #[test]
    fn zero_matrix_is_a_tto() {
        let (space, cb) = f1();
        let points = PointConfig::with_boundary(cb.etas).unwrap();
        let v = space.detthm_test(&Sym3::diagonal([ZERO; 3]), &cb.basis, &points).unwrap();
        assert!(v.is_rep);
    }

    #[test]
    fn f1_relation_is_s4_minus_s5() {
        let (_, cb) = f1();
        for variant in [Variant::Paper, Variant::General] {
            let rel = ClarkRelation::new(&cb, variant).unwrap();
            assert!((rel.k4 / rel.span - 1.0).norm() < 1e-12);
            assert!((rel.k5 / rel.span + 1.0).norm() < 1e-12);
        }
        let v = clark_s6_test(&f1_shift(), &cb, Variant::General, 1e-8).unwrap();
        assert!(v.is_rep);
        assert!((v.predicted_s6 - 1.0 / 3.0).norm() < 1e-12);
    }

    #[test]
    fn lone_s6_fails_every_clark_basis() {
        let s = Sym3::corollary_family(3, 0.0, 0.0, 0.0).unwrap();
        for trial in 0..10 {
            let (_, cb) = random_clark_basis(11, trial, NumericConfig::default()).unwrap();
            for variant in [Variant::Paper, Variant::General] {
                let v = clark_s6_test(&s, &cb, variant, 1e-8).unwrap();
                assert!(!v.is_rep);
                assert!(v.predicted_s6.norm() < 1e-15);
            }
        }
    }

    #[test]
    fn block_expansion_matches_closed_form() {
        for trial in 0..10 {
            let (space, cb) = random_clark_basis(5, trial, NumericConfig::default()).unwrap();
            let rel = ClarkRelation::new(&cb, Variant::General).unwrap();
            let (s4, s5) = (c(0.3, -0.7), c(-1.1, 0.2));
            let closed = rel.predicted_s6(s4, s5);
            for lambda in [c(0.41, 0.13), c(-0.2, 0.5)] {
                let expanded = s6_by_block_expansion(&space, &cb, lambda, s4, s5).unwrap();
                assert!((expanded - closed).norm() < 1e-9 * (1.0 + closed.norm()), "{expanded} vs {closed}");
            }
        }
    }

    #[test]
    fn corollary_families_layout() {
        let f1 = Sym3::corollary_family(1, 1.0, 2.0, 3.0).unwrap();
        assert_eq!(f1.get(0, 2), c(1.0, 0.0));
        assert_eq!(f1.get(2, 0), c(1.0, 0.0));
        assert_eq!(f1.get(0, 1), ZERO);
        let f2 = Sym3::corollary_family(2, 1.0, 2.0, 3.0).unwrap();
        assert_eq!(f2.get(1, 0), c(1.0, 0.0));
        let f3 = Sym3::corollary_family(3, 1.0, 2.0, 3.0).unwrap();
        assert_eq!(f3.get(2, 1), c(1.0, 0.0));
        assert!(Sym3::corollary_family(4, 0.0, 0.0, 0.0).is_err());
        for f in [f1, f2, f3] {
            assert!(f.normality_defect() < 1e-12);
        }
    }

    #[test]
    fn counterexample_report_family_three() {
        let r = counterexample_report(3, (0.0, 0.0, 0.0), 20, 1, NumericConfig::default()).unwrap();
        assert!(r.is_normal());
        assert!(r.fails_every_clark_basis());
        assert!(r.min_gap > 0.5);
        assert!(r.relation_residual.unwrap() < 1e-12);
    }
}

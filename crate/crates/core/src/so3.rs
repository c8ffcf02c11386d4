//! Representability with respect to *some* `C_θ`-real basis.
//!
//! Every `C_θ`-real basis is `vᵢ = Σⱼ Uⱼᵢ cbⱼ` for a real orthogonal `U` and
//! a fixed modified Clark basis, and then `[A]_v = Uᵀ[A]_cb U`. So `S` is
//! representable iff some rotation `U` makes `U S Uᵀ` satisfy the Clark
//! relation. The relation is one complex equation on the three-dimensional
//! group, so solutions typically form curves; [`solve`] searches for one by
//! multistart Levenberg–Marquardt in the Lie algebra.

use nalgebra::{Matrix2, Matrix3, Rotation3, Vector2, Vector3};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::TAU;

use crate::clark::ClarkBasis;
use crate::error::{Error, Result};
use crate::modelspace::{KThetaElement, ModelSpace, OrthonormalBasis};
use crate::random;
use crate::repcheck::{Certificate, ClarkRelation, Sym3, Variant};
use crate::tto::PointConfig;

const ORTHOGONAL_TOL: f64 = 1e-10;

/// Real orthogonal 3×3 matrix stored row-major as `(r₁ r₂ r₃; r₄ r₅ r₆; r₇ r₈ r₉)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthMatrix3 {
    r: [f64; 9],
}

impl OrthMatrix3 {
    pub fn new(r: [f64; 9]) -> Result<Self> {
        let m = OrthMatrix3 { r };
        let defect = m.orthogonality_defect();
        if !(defect < ORTHOGONAL_TOL) {
            return Err(Error::Precondition(format!("matrix is not orthogonal (‖UUᵀ − I‖ = {defect:.3e})")));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        OrthMatrix3 { r: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0] }
    }

    pub fn from_matrix(m: &Matrix3<f64>) -> Result<Self> {
        Self::new(std::array::from_fn(|k| m[(k / 3, k % 3)]))
    }

    /// Rotation `exp([w]ₓ)`.
    pub fn from_scaled_axis(w: [f64; 3]) -> Self {
        Self::from_rotation(&Rotation3::new(Vector3::from(w)))
    }

    fn from_rotation(rot: &Rotation3<f64>) -> Self {
        let m = rot.matrix();
        OrthMatrix3 { r: std::array::from_fn(|k| m[(k / 3, k % 3)]) }
    }

    /// Haar-uniform rotation (Shoemake's subgroup algorithm).
    pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
        let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
        let q = nalgebra::Quaternion::new(
            b * (TAU * u3).cos(),
            a * (TAU * u2).sin(),
            a * (TAU * u2).cos(),
            b * (TAU * u3).sin(),
        );
        let unit = nalgebra::UnitQuaternion::from_quaternion(q);
        Self::from_rotation(&unit.to_rotation_matrix())
    }

    pub fn entries(&self) -> [f64; 9] {
        self.r
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_row_slice(&self.r)
    }

    pub fn transpose(&self) -> Self {
        OrthMatrix3 { r: std::array::from_fn(|k| self.r[(k % 3) * 3 + k / 3]) }
    }

    pub fn determinant(&self) -> f64 {
        self.matrix().determinant()
    }

    /// `max(‖UUᵀ − I‖_F, ‖UᵀU − I‖_F)`.
    pub fn orthogonality_defect(&self) -> f64 {
        let m = self.matrix();
        let id = Matrix3::identity();
        (m * m.transpose() - id).norm().max((m.transpose() * m - id).norm())
    }

    fn complex(&self) -> Matrix3<Complex64> {
        self.matrix().map(|x| Complex64::new(x, 0.0))
    }
}

/// `U S Uᵀ`.
pub fn conjugate_representation(s: &Sym3, u: &OrthMatrix3) -> Sym3 {
    let uc = u.complex();
    Sym3::from_matrix(&(uc * s.to_matrix() * uc.transpose()))
}

/// The off-diagonal entries `(A₄, A₅, A₆)` of `U M Uᵀ`, written out as the
/// polynomials in `r₁ … r₉` and `m₁ … m₆`.
pub fn relation_polynomials(m: &Sym3, u: &OrthMatrix3) -> [Complex64; 3] {
    let [m1, m2, m3, m4, m5, m6] = m.s;
    let [r1, r2, r3, r4, r5, r6, r7, r8, r9] = u.r;
    let a6 = m1 * r4 * r7
        + m4 * r5 * r7
        + m5 * r6 * r7
        + m4 * r4 * r8
        + m2 * r5 * r8
        + m6 * r6 * r8
        + m5 * r4 * r9
        + m6 * r5 * r9
        + m3 * r6 * r9;
    let a4 = m1 * r1 * r4
        + m4 * r2 * r4
        + m5 * r3 * r4
        + m4 * r1 * r5
        + m2 * r2 * r5
        + m6 * r3 * r5
        + m5 * r1 * r6
        + m6 * r2 * r6
        + m3 * r3 * r6;
    let a5 = m1 * r1 * r7
        + m4 * r2 * r7
        + m5 * r3 * r7
        + m4 * r1 * r8
        + m2 * r2 * r8
        + m6 * r3 * r8
        + m5 * r1 * r9
        + m6 * r2 * r9
        + m3 * r3 * r9;
    [a4, a5, a6]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals {
    /// `‖UUᵀ − I‖_F`.
    pub orth: f64,
    /// `|(η₃ − η₂)A₆ − k₄A₄ − k₅A₅|`.
    pub relation: f64,
}

pub fn residuals(s: &Sym3, u: &OrthMatrix3, cb: &ClarkBasis, variant: Variant) -> Result<Residuals> {
    let relation = ClarkRelation::new(cb, variant)?;
    let [a4, a5, a6] = relation_polynomials(s, u);
    Ok(Residuals { orth: u.orthogonality_defect(), relation: relation.residual(a4, a5, a6).norm() })
}

/// Orthogonal eigenvector matrix of a real symmetric `S`, oriented so that
/// `U S Uᵀ` is diagonal and `det U = +1`. `None` when `S` is not real.
pub fn spectral_shortcut(s: &Sym3) -> Option<OrthMatrix3> {
    let scale = s.s.iter().map(|x| x.norm()).fold(1.0, f64::max);
    if !s.is_real(1e-14 * scale) {
        return None;
    }
    let real = s.to_matrix().map(|x| x.re);
    let eig = real.symmetric_eigen();
    let mut u = eig.eigenvectors.transpose();
    if u.determinant() < 0.0 {
        u = -u;
    }
    OrthMatrix3::from_matrix(&u).ok()
}

/// `vᵢ = Σⱼ Uⱼᵢ cbⱼ`, a `C_θ`-real orthonormal basis.
pub fn creal_basis_from_orthogonal(space: &ModelSpace, cb: &ClarkBasis, u: &OrthMatrix3) -> Result<OrthonormalBasis> {
    let m = u.matrix();
    let cbs = cb.elements();
    let mut elements = Vec::with_capacity(3);
    for i in 0..3 {
        let terms: Vec<(Complex64, &KThetaElement)> =
            (0..3).map(|j| (Complex64::new(m[(j, i)], 0.0), &cbs[j])).collect();
        elements.push(KThetaElement::combination(&terms)?);
    }
    space.orthonormal_basis(elements, "clark-rotated")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub starts: usize,
    pub tol: f64,
    pub seed: u64,
    pub variant: Variant,
    pub max_iterations: usize,
    /// Keep searching after the first solution and report every distinct one.
    pub collect_all: bool,
    pub cluster_radius: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            starts: 100,
            tol: 1e-8,
            seed: 0,
            variant: Variant::General,
            max_iterations: 500,
            collect_all: false,
            cluster_radius: 1e-4,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::InvalidConfig("starts must be positive".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub found: bool,
    pub best_matrix: OrthMatrix3,
    pub best_residual: f64,
    /// `U S Uᵀ` for the best `U`.
    pub conjugated: Sym3,
    /// Determinant-test certificate of `conjugated` in the Clark basis; only
    /// present when a solution was found.
    pub certificate: Option<Certificate>,
    pub starts_used: usize,
    /// Distinct solutions, when `collect_all` was requested.
    pub solutions: Vec<OrthMatrix3>,
}

impl SolveReport {
    /// Outcome label; a miss is a statement about the search budget only.
    pub fn outcome(&self) -> &'static str {
        if self.found {
            "found"
        } else {
            "not-found-within-budget"
        }
    }
}

fn hat(k: usize) -> Matrix3<Complex64> {
    let mut w = Vector3::zeros();
    w[k] = 1.0;
    w.cross_matrix().map(|x| Complex64::new(x, 0.0))
}

struct LocalResult {
    rotation: Rotation3<f64>,
    residual: f64,
}

/// Levenberg–Marquardt on `U ← exp([δ]ₓ)U` for the two real components of
/// the relation residual; minimum-norm steps since the system is
/// underdetermined.
fn local_search(
    s: &Matrix3<Complex64>,
    relation: &ClarkRelation,
    start: Rotation3<f64>,
    cfg: &SolverConfig,
) -> LocalResult {
    let generators = [hat(0), hat(1), hat(2)];
    let eval = |rot: &Rotation3<f64>| {
        let u = rot.matrix().map(|x| Complex64::new(x, 0.0));
        let x = u * s * u.transpose();
        (x, relation.residual(x[(0, 1)], x[(0, 2)], x[(1, 2)]))
    };
    let mut rot = start;
    let (mut x, mut r) = eval(&rot);
    let mut damping = 1e-6;
    let polish = cfg.tol * 1e-4;
    for _ in 0..cfg.max_iterations {
        if r.norm() < polish {
            break;
        }
        let mut jac = nalgebra::Matrix2x3::<f64>::zeros();
        for (k, g) in generators.iter().enumerate() {
            let dx = g * x - x * g;
            let dr = relation.residual(dx[(0, 1)], dx[(0, 2)], dx[(1, 2)]);
            jac[(0, k)] = dr.re;
            jac[(1, k)] = dr.im;
        }
        let rv = Vector2::new(r.re, r.im);
        let jjt = jac * jac.transpose();
        let scale = jjt.trace().max(1e-300);
        let mut accepted = false;
        let mut step_norm = 0.0;
        for _ in 0..30 {
            let lhs = jjt + Matrix2::identity() * (damping * scale);
            let Some(inv) = lhs.try_inverse() else {
                damping *= 10.0;
                continue;
            };
            let delta: Vector3<f64> = -(jac.transpose() * (inv * rv));
            step_norm = delta.norm();
            let candidate = Rotation3::new(delta) * rot;
            let (cx, cr) = eval(&candidate);
            if cr.norm() < r.norm() {
                rot = candidate;
                x = cx;
                r = cr;
                damping = (damping / 4.0).max(1e-15);
                accepted = true;
                break;
            }
            damping *= 4.0;
            if step_norm < 1e-12 {
                break;
            }
        }
        if !accepted || step_norm < 1e-12 {
            break;
        }
    }
    rot.renormalize();
    let (_, r) = eval(&rot);
    LocalResult { rotation: rot, residual: r.norm() }
}

fn start_rotation(s: &Sym3, cfg: &SolverConfig, index: usize) -> Rotation3<f64> {
    let as_rotation = |u: OrthMatrix3| Rotation3::from_matrix_unchecked(u.matrix());
    match index {
        0 => spectral_shortcut(s).map(as_rotation).unwrap_or_else(Rotation3::identity),
        1 => Rotation3::identity(),
        _ => {
            let mut rng = random::substream(cfg.seed, index as u64);
            as_rotation(OrthMatrix3::random_rotation(&mut rng))
        }
    }
}

/// Searches `SO(3)` for `U` with `U S Uᵀ` representable in the Clark basis.
///
/// Start 0 is the spectral diagonalizer when `S` is real, start 1 the
/// identity, and every further start a Haar-random rotation drawn from its
/// own substream of `cfg.seed`. The first start (in index order) that
/// reaches `cfg.tol` wins, so the result does not depend on scheduling.
pub fn solve(space: &ModelSpace, s: &Sym3, cb: &ClarkBasis, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let relation = ClarkRelation::new(cb, cfg.variant)?;
    let sm = s.to_matrix();
    let mut best: Option<(f64, usize, Rotation3<f64>)> = None;
    let mut solutions: Vec<OrthMatrix3> = Vec::new();
    let mut starts_used = 0;
    for index in 0..cfg.starts {
        starts_used += 1;
        let local = local_search(&sm, &relation, start_rotation(s, cfg, index), cfg);
        if best.as_ref().is_none_or(|(r, _, _)| local.residual < *r) {
            best = Some((local.residual, index, local.rotation));
        }
        if local.residual < cfg.tol {
            if !cfg.collect_all {
                best = Some((local.residual, index, local.rotation));
                break;
            }
            let u = OrthMatrix3::from_rotation(&local.rotation);
            if solutions.iter().all(|v| (v.matrix() - u.matrix()).norm() > cfg.cluster_radius) {
                solutions.push(u);
            }
        }
    }
    let (best_residual, _, rotation) = best.expect("at least one start");
    let best_matrix = OrthMatrix3::from_rotation(&rotation);
    let conjugated = conjugate_representation(s, &best_matrix);
    let found = best_residual < cfg.tol;
    let certificate = if found {
        let points = PointConfig::with_boundary(cb.etas)?;
        Some(space.detthm_test(&conjugated, &cb.basis, &points)?.certificate)
    } else {
        None
    };
    if found && !cfg.collect_all {
        solutions.push(best_matrix);
    }
    Ok(SolveReport { found, best_matrix, best_residual, conjugated, certificate, starts_used, solutions })
}

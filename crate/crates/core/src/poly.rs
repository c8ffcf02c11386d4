//! Dense complex polynomials in ascending coefficient order
//! (`p[k]` multiplies `z^k`).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Monic polynomial `∏ (z − r)`.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    roots.iter().fold(vec![ONE], |acc, &r| mul(&acc, &[-r, ONE]))
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `a + s·b`, padded to the longer length.
pub fn axpy(a: &[Complex64], s: Complex64, b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n).map(|k| a.get(k).copied().unwrap_or(ZERO) + s * b.get(k).copied().unwrap_or(ZERO)).collect()
}

pub fn eval(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

pub fn derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

/// Divides `p` by `(1 − a·z)`, returning the quotient and the remainder
/// left in the top coefficient.
///
/// The recurrence runs upwards from the constant term, which stays stable
/// for `|a| ≤ 1`.
pub fn divide_by_one_minus(p: &[Complex64], a: Complex64) -> (Vec<Complex64>, Complex64) {
    if p.is_empty() {
        return (Vec::new(), ZERO);
    }
    let n = p.len() - 1;
    let mut q = Vec::with_capacity(n);
    let mut prev = ZERO;
    for &c in &p[..n] {
        prev = c + a * prev;
        q.push(prev);
    }
    let remainder = p[n] + a * prev;
    (q, remainder)
}

fn trimmed(p: &[Complex64]) -> &[Complex64] {
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut end = p.len();
    while end > 1 && p[end - 1].norm() <= 1e-300_f64.max(scale * 1e-300) {
        end -= 1;
    }
    &p[..end]
}

/// Roots as eigenvalues of the companion matrix.
pub fn companion_roots(p: &[Complex64]) -> Result<Vec<Complex64>> {
    let p = trimmed(p);
    let n = p.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = p[n];
    if lead.norm() == 0.0 {
        return Err(Error::Linalg("zero polynomial".into()));
    }
    let mut companion = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = ONE;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -p[i] / lead;
    }
    let schur = nalgebra::linalg::Schur::try_new(companion, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Linalg("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Closed-form roots of `a·z³ + b·z² + c·z + d`, each refined by two Newton
/// steps on the cubic.
pub fn cubic_roots(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<[Complex64; 3]> {
    if a.norm() == 0.0 {
        return Err(Error::Precondition("leading cubic coefficient is zero".into()));
    }
    let delta0 = b * b - 3.0 * a * c;
    let delta1 = 2.0 * b * b * b - 9.0 * a * b * c + 27.0 * a * a * d;
    let disc = (delta1 * delta1 - 4.0 * delta0 * delta0 * delta0).sqrt();
    let plus = (delta1 + disc) / 2.0;
    let minus = (delta1 - disc) / 2.0;
    let big = if plus.norm() >= minus.norm() { plus } else { minus };
    let cbrt = big.powf(1.0 / 3.0);
    let xi = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let coeffs = [d, c, b, a];
    let dcoeffs = derivative(&coeffs);
    let mut roots = [ZERO; 3];
    for (k, root) in roots.iter_mut().enumerate() {
        let mut z = if cbrt.norm() == 0.0 {
            -b / (3.0 * a)
        } else {
            let ck = cbrt * xi.powu(k as u32);
            -(b + ck + delta0 / ck) / (3.0 * a)
        };
        for _ in 0..2 {
            let dp = eval(&dcoeffs, z);
            if dp.norm() > 0.0 {
                z -= eval(&coeffs, z) / dp;
            }
        }
        *root = z;
    }
    Ok(roots)
}

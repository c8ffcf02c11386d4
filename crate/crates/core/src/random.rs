//! Seeded samplers for the randomized checks and trial loops.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blaschke::BlaschkeProduct;
use crate::clark::ClarkParams;

/// Largest modulus used for sampled zeros and Clark points.
pub const MAX_RADIUS: f64 = 0.85;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` derived from a master seed.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

pub fn unimodular<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..TAU))
}

/// Uniform on the disc of radius `radius`.
pub fn disc_point<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..TAU))
}

/// Real and imaginary parts uniform in `[-1, 1]`.
pub fn complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Order-`n` product with zeros in the disc of radius [`MAX_RADIUS`] and a
/// random unimodular front constant.
pub fn blaschke<R: Rng + ?Sized>(rng: &mut R, order: usize) -> BlaschkeProduct {
    let zeros = (0..order).map(|_| disc_point(rng, MAX_RADIUS)).collect();
    BlaschkeProduct::new(zeros, unimodular(rng)).expect("sampled zeros lie inside the disc")
}

pub fn clark_params<R: Rng + ?Sized>(rng: &mut R) -> ClarkParams {
    ClarkParams::new(disc_point(rng, MAX_RADIUS), unimodular(rng)).expect("sampled parameters are valid")
}

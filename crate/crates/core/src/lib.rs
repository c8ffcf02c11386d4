#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

//! Numerical toolkit for truncated Toeplitz operators on model spaces
//! `K_θ = H² ⊖ θH²` with `θ` a finite Blaschke product.
//!
//! The centre of the crate is the three-dimensional case: deciding whether a
//! complex symmetric 3×3 matrix represents a truncated Toeplitz operator with
//! respect to a given modified Clark basis ([`repcheck`]) or with respect to
//! some `C_θ`-real orthonormal basis ([`so3`]). Every decision carries a
//! constructive certificate that can be checked independently.
//!
//! ```
//! use model_space_lab::{BlaschkeProduct, ClarkParams, ModelSpace, NumericConfig};
//! use num_complex::Complex64;
//!
//! let theta = BlaschkeProduct::new(vec![Complex64::new(0.0, 0.0); 3], Complex64::new(1.0, 0.0)).unwrap();
//! let space = ModelSpace::new(theta, NumericConfig::default()).unwrap();
//! let cb = space.modified_clark_basis(&ClarkParams::default()).unwrap();
//! assert!((cb.etas[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
//! ```

pub mod blaschke;
pub mod clark;
pub mod config;
pub mod error;
pub mod modelspace;
pub mod poly;
pub mod quadrature;
pub mod random;
pub mod repcheck;
pub mod so3;
pub mod tto;

pub use blaschke::BlaschkeProduct;
pub use clark::{ClarkBasis, ClarkParams};
pub use config::NumericConfig;
pub use error::{Error, Result};
pub use modelspace::{KThetaElement, ModelSpace, OrthonormalBasis};
pub use repcheck::{Certificate, Sym3, Variant};
pub use so3::{OrthMatrix3, SolveReport, SolverConfig};
pub use tto::{PointConfig, Symbol, TtoMatrix};

pub use num_complex::Complex64;

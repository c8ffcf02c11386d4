use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Blaschke product: {0}")]
    InvalidBlaschke(String),
    #[error("evaluation at a pole of the Blaschke product (z = {z})")]
    Pole { z: Complex64 },
    #[error("level-set points collapsed: closest pair {gap:.3e} apart")]
    DegenerateRoots { gap: f64 },
    #[error("level-set polishing failed: residual {residual:.3e}")]
    LevelSetResidual { residual: f64 },
    #[error("circle quadrature not converged: halving the rule changed the value by {change:.3e}")]
    QuadratureNotConverged { change: f64 },
    #[error("kernel division left remainder {remainder:.3e}")]
    DivisionRemainder { remainder: f64 },
    #[error("elements belong to different model spaces")]
    ThetaMismatch,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("Clark target undefined: |1 + conj(θ(t))α| = {0:.3e}")]
    DegenerateClark(f64),
    #[error("basis element {index} is not C_θ-real (defect {defect:.3e})")]
    NotCReal { index: usize, defect: f64 },
    #[error("basis is not orthonormal (Gram residual {0:.3e})")]
    NotOrthonormal(f64),
    #[error("rank-one generators are ill-conditioned (σ5/σ1 = {ratio:.3e}); verdict indeterminate")]
    Indeterminate { ratio: f64 },
    #[error("Clark basis invariant violated: {0}")]
    ClarkInvariant(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

pub type Result<T> = std::result::Result<T, Error>;

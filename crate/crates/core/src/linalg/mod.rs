//! Complex dense and iterative linear algebra: matrix-free GMRES, direct
//! cyclic-tridiagonal solves for the radiation-operator resolvents, and a
//! dense nonsymmetric eigensolver for spectra and condition numbers.

mod cyclic;
mod dense;
mod eig;
mod gmres;

pub use cyclic::solve_cyclic_tridiagonal;
pub use dense::{CMatrix, LuDecomposition};
pub use eig::{
    eigenvalues, singular_value_condition_number, spectral_condition_number, MAX_DENSE_DIM,
};
pub use gmres::{gmres, GmresReport};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinAlgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix of size {0} exceeds the dense feasibility bound {1}")]
    SizeLimit(usize, usize),
    #[error("singular system: pivot magnitude {pivot:e} below threshold")]
    Singular { pivot: f64 },
    #[error("right-hand side must be nonzero")]
    ZeroRhs,
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("QR iteration failed to converge on a {0}x{0} block")]
    QrNoConvergence(usize),
    #[error("cyclic tridiagonal systems need at least 3 unknowns, got {0}")]
    SystemTooSmall(usize),
}

/// Abstract "apply to a complex vector" contract shared by the discrete
/// operator, its preconditioned composition, and plain dense matrices.
pub trait LinearMap {
    fn dim(&self) -> usize;
    /// `out = A·v`; implementations may assume `v.len() == out.len() == dim()`.
    fn apply(&self, v: &[Complex64], out: &mut [Complex64]);
}

pub(crate) fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

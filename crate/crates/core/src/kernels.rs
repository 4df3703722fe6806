//! The 2D Helmholtz fundamental solution and its source-normal derivative,
//! evaluated at displaced source points.
//!
//! With the sources shifted to the inward parallel curve, both kernels stay
//! smooth on the boundary and no singularity handling of any kind is
//! needed; the only guarded failure is an (accidentally) coincident
//! target/source pair.

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::Point2;
use crate::specfun::{self, SpecFunError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KernelError {
    #[error("kernel evaluated at coincident points (|x - z| = {separation:e})")]
    CoincidentPoints { separation: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

const MIN_SEPARATION: f64 = 1e-14;

/// Fundamental solution `Φ(x, z) = (i/4)·H_0^(1)(k|x − z|)`.
pub fn fundamental_solution(k: f64, x: Point2, z: Point2) -> Result<Complex64, KernelError> {
    let r = x.distance(z);
    if r < MIN_SEPARATION {
        return Err(KernelError::CoincidentPoints { separation: r });
    }
    let h0 = specfun::hankel1(0, k * r)?;
    Ok(Complex64::new(0.0, 0.25) * h0)
}

/// Source-normal derivative of the fundamental solution,
/// `ν·∇_z Φ(x, z) = (ik/4)·H_1^(1)(k r)·(ν·(x − z))/r`, `r = |x − z|`.
pub fn double_layer_kernel(
    k: f64,
    x: Point2,
    z: Point2,
    normal: Point2,
) -> Result<Complex64, KernelError> {
    let diff = x - z;
    let r = diff.norm();
    if r < MIN_SEPARATION {
        return Err(KernelError::CoincidentPoints { separation: r });
    }
    let h1 = specfun::hankel1(1, k * r)?;
    let projection = normal.dot(diff) / r;
    Ok(Complex64::new(0.0, 0.25 * k) * h1 * projection)
}

/// Both kernels at once; the two share the Hankel evaluations, which
/// dominate the cost of assembling the N×N kernel tables.
pub fn kernel_pair(
    k: f64,
    x: Point2,
    z: Point2,
    normal: Point2,
) -> Result<(Complex64, Complex64), KernelError> {
    let diff = x - z;
    let r = diff.norm();
    if r < MIN_SEPARATION {
        return Err(KernelError::CoincidentPoints { separation: r });
    }
    let (h0, h1) = specfun::hankel1_01(k * r)?;
    let single = Complex64::new(0.0, 0.25) * h0;
    let double = Complex64::new(0.0, 0.25 * k) * h1 * (normal.dot(diff) / r);
    Ok((single, double))
}

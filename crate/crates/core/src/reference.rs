//! Analytic reference solutions: the manufactured multi-source radiating
//! field, the separable series for plane-wave scattering by a sound-soft
//! circle, and the closed-form circle spectra used to validate the
//! discrete operator.

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::Point2;
use crate::kernels::{self, KernelError};
use crate::specfun::{self, SpecFunError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ReferenceError {
    #[error("evaluation point coincides with source {index}")]
    SourceCoincidence { index: usize },
    #[error("point with |x| = {radius} lies inside the circle of radius {expected}")]
    InsideObstacle { radius: f64, expected: f64 },
    #[error("series terms stopped decaying at order {order}")]
    SeriesDivergence { order: u32 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// The four interior point sources of the manufactured radiating field.
pub fn manufactured_sources() -> [Point2; 4] {
    [
        Point2::new(0.75, -0.5),
        Point2::new(0.75, 0.5),
        Point2::new(-0.75, 0.5),
        Point2::new(-0.75, -0.5),
    ]
}

/// `F(x) = Σ_j Φ(x, y_j)` over the four interior sources: an exact
/// radiating Helmholtz solution wherever the sources are enclosed.
pub fn manufactured_field(k: f64, x: Point2) -> Result<Complex64, ReferenceError> {
    let mut total = Complex64::new(0.0, 0.0);
    for (index, source) in manufactured_sources().into_iter().enumerate() {
        let phi = kernels::fundamental_solution(k, x, source).map_err(|e| match e {
            KernelError::CoincidentPoints { .. } => ReferenceError::SourceCoincidence { index },
            other => ReferenceError::Kernel(other),
        })?;
        total += phi;
    }
    Ok(total)
}

/// Result of the circle-scattering series evaluation.
#[derive(Debug, Clone, Copy)]
pub struct MieField {
    pub scattered: Complex64,
    pub total: Complex64,
    /// Magnitude of the last retained term; a bound on the truncation tail.
    pub truncation_tail: f64,
}

/// Scattered and total field for a unit-amplitude plane wave `e^{ikx}`
/// hitting a sound-soft circle of radius `radius` centered at the origin:
///
/// `u_sc(r, θ) = −Σ_{n≥0} ε_n i^n (J_n(kR)/H_n(kR)) H_n(kr) cos(nθ)`
///
/// with `ε_0 = 1`, `ε_n = 2` otherwise, truncated at `ceil(kR) + 40`.
pub fn mie_soft_circle(k: f64, radius: f64, x: Point2) -> Result<MieField, ReferenceError> {
    let r = x.norm();
    if r < radius * (1.0 - 1e-12) {
        return Err(ReferenceError::InsideObstacle {
            radius: r,
            expected: radius,
        });
    }
    let theta = x.y.atan2(x.x);
    let n_max = (k * radius).ceil() as u32 + 40;

    let mut scattered = Complex64::new(0.0, 0.0);
    let mut tail = 0.0_f64;
    let mut prev_mag = f64::INFINITY;
    let mut i_pow = Complex64::new(1.0, 0.0);

    for n in 0..=n_max {
        let (j_r, y_r) = specfun::bessel_jy(n, k * radius)?;
        let h_boundary = Complex64::new(j_r, y_r);
        let h_field = specfun::hankel1(n, k * r)?;
        let weight = if n == 0 { 1.0 } else { 2.0 };
        let coeff = -weight * i_pow * (j_r / h_boundary) * h_field;
        scattered += coeff * (n as f64 * theta).cos();
        tail = coeff.norm();

        // Beyond the turning point the coefficients J_n(kR)/H_n(kR) decay
        // super-exponentially; growth there means the series is unusable.
        if n > (k * radius).ceil() as u32 + 5 {
            if tail > prev_mag * 1.5 {
                return Err(ReferenceError::SeriesDivergence { order: n });
            }
            prev_mag = tail;
        }
        i_pow *= Complex64::new(0.0, 1.0);
    }

    let incident = Complex64::from_polar(1.0, k * x.x);
    Ok(MieField {
        scattered,
        total: incident + scattered,
        truncation_tail: tail,
    })
}

/// Hankel ratios `ρ_m = H_{m−1}(x)/H_m(x)` for `m = 1..=n`, computed by the
/// forward recurrence `ρ_{m+1} = 1/(2m/x − ρ_m)`, which follows the
/// dominant solution and therefore stays stable for all orders.
fn hankel_ratios(n: u32, x: f64) -> Result<Vec<Complex64>, SpecFunError> {
    let h0 = specfun::hankel1(0, x)?;
    let h1 = specfun::hankel1(1, x)?;
    let mut ratios = Vec::with_capacity(n as usize + 1);
    ratios.push(Complex64::new(0.0, 0.0)); // unused slot for m = 0
    let mut rho = h0 / h1;
    ratios.push(rho);
    for m in 1..n {
        rho = Complex64::new(1.0, 0.0) / (Complex64::new(2.0 * m as f64 / x, 0.0) - rho);
        ratios.push(rho);
    }
    Ok(ratios)
}

/// Exact Dirichlet-to-Neumann eigenvalue of the circle of radius `a`:
/// `γ_n = k·H_n'(ka)/H_n(ka)` for the Fourier mode `e^{inθ}`.
pub fn circle_exact_dtn_eigenvalue(k: f64, a: f64, n: i64) -> Result<Complex64, ReferenceError> {
    let order = n.unsigned_abs() as u32;
    let x = k * a;
    if order == 0 {
        let h0 = specfun::hankel1(0, x)?;
        let h1 = specfun::hankel1(1, x)?;
        return Ok(-k * h1 / h0);
    }
    let ratios = hankel_ratios(order, x)?;
    // H_n'/H_n = H_{n−1}/H_n − n/x.
    Ok(k * ratios[order as usize] - Complex64::new(order as f64 / a, 0.0))
}

/// Eigenvalue `λ_n = H_n(ka)/H_n(k(a−h))` of the displaced-source operator
/// on a circle of radius `a` with the exact radiation map, evaluated as a
/// product of order-wise Hankel ratios so large orders neither overflow
/// nor lose accuracy.
pub fn circle_virtual_source_eigenvalue(
    k: f64,
    a: f64,
    h: f64,
    n: i64,
) -> Result<Complex64, ReferenceError> {
    assert!(h > 0.0 && h < a, "displacement must satisfy 0 < h < a");
    let order = n.unsigned_abs() as u32;
    let outer = k * a;
    let inner = k * (a - h);
    let h0_outer = specfun::hankel1(0, outer)?;
    let h0_inner = specfun::hankel1(0, inner)?;
    let mut value = h0_outer / h0_inner;
    if order == 0 {
        return Ok(value);
    }
    let ratios_outer = hankel_ratios(order, outer)?;
    let ratios_inner = hankel_ratios(order, inner)?;
    for m in 1..=order as usize {
        // H_m(ka)/H_m(kb) = [H_{m−1}(ka)/H_{m−1}(kb)]·ρ_m(kb)/ρ_m(ka)
        value *= ratios_inner[m] / ratios_outer[m];
    }
    Ok(value)
}

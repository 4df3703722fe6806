//! Direct solution of cyclic (periodic) tridiagonal systems by the
//! Sherman–Morrison reduction to two plain tridiagonal solves.

use num_complex::Complex64;

use super::LinAlgError;

/// Solves the cyclic tridiagonal system
///
/// ```text
/// | d_0  u_0            c_tr | x = rhs
/// | l_0  d_1  u_1            |
/// |      ...  ...  ...       |
/// |           l_{n-2} d_{n-1}|
/// | c_bl  ...                |
/// ```
///
/// where `corners = (c_tr, c_bl)` are the wrap-around entries
/// `A[0][n−1]` and `A[n−1][0]`.
pub fn solve_cyclic_tridiagonal(
    diag: &[Complex64],
    upper: &[Complex64],
    lower: &[Complex64],
    corners: (Complex64, Complex64),
    rhs: &[Complex64],
) -> Result<Vec<Complex64>, LinAlgError> {
    let n = diag.len();
    if n < 3 {
        return Err(LinAlgError::SystemTooSmall(n));
    }
    for (len, expected) in [(upper.len(), n - 1), (lower.len(), n - 1), (rhs.len(), n)] {
        if len != expected {
            return Err(LinAlgError::DimensionMismatch { expected, got: len });
        }
    }

    let (corner_tr, corner_bl) = corners;

    // A = T + u·vᵀ with u = (γ, 0, …, 0, c_bl)ᵀ, v = (1, 0, …, 0, c_tr/γ)ᵀ;
    // T is tridiagonal with modified first and last diagonal entries.
    let gamma = if diag[0].norm() > 0.0 {
        -diag[0]
    } else {
        Complex64::new(1.0, 0.0)
    };

    let mut t_diag = diag.to_vec();
    t_diag[0] -= gamma;
    t_diag[n - 1] -= corner_tr * corner_bl / gamma;

    let solve_t = |b: &[Complex64]| -> Result<Vec<Complex64>, LinAlgError> {
        thomas_solve(&t_diag, upper, lower, b)
    };

    let y = solve_t(rhs)?;
    let mut u = vec![Complex64::new(0.0, 0.0); n];
    u[0] = gamma;
    u[n - 1] = corner_bl;
    let q = solve_t(&u)?;

    // vᵀy and vᵀq
    let vy = y[0] + corner_tr / gamma * y[n - 1];
    let vq = q[0] + corner_tr / gamma * q[n - 1];
    let denom = Complex64::new(1.0, 0.0) + vq;
    if denom.norm() < 1e-14 {
        return Err(LinAlgError::Singular {
            pivot: denom.norm(),
        });
    }
    let factor = vy / denom;

    Ok(y.iter().zip(&q).map(|(yi, qi)| yi - factor * qi).collect())
}

/// Thomas algorithm (no pivoting); diagonal dominance of the callers'
/// systems keeps it stable, and vanishing pivots are reported.
fn thomas_solve(
    diag: &[Complex64],
    upper: &[Complex64],
    lower: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>, LinAlgError> {
    let n = diag.len();
    let scale = diag
        .iter()
        .map(|d| d.norm())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut c_prime = vec![Complex64::new(0.0, 0.0); n - 1];
    let mut x = vec![Complex64::new(0.0, 0.0); n];

    let mut pivot = diag[0];
    if pivot.norm() < 1e-14 * scale {
        return Err(LinAlgError::Singular {
            pivot: pivot.norm(),
        });
    }
    c_prime[0] = upper[0] / pivot;
    x[0] = rhs[0] / pivot;

    for i in 1..n {
        pivot = diag[i] - lower[i - 1] * c_prime[i - 1];
        if pivot.norm() < 1e-14 * scale {
            return Err(LinAlgError::Singular {
                pivot: pivot.norm(),
            });
        }
        if i < n - 1 {
            c_prime[i] = upper[i] / pivot;
        }
        x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / pivot;
    }

    for i in (0..n - 1).rev() {
        let correction = c_prime[i] * x[i + 1];
        x[i] -= correction;
    }
    Ok(x)
}

/// Multiplies a cyclic tridiagonal matrix by a vector (test/verification aid).
#[cfg(test)]
pub(crate) fn cyclic_tridiagonal_mul(
    diag: &[Complex64],
    upper: &[Complex64],
    lower: &[Complex64],
    corners: (Complex64, Complex64),
    v: &[Complex64],
) -> Vec<Complex64> {
    let n = diag.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        out[i] = diag[i] * v[i];
        if i + 1 < n {
            out[i] += upper[i] * v[i + 1];
        }
        if i > 0 {
            out[i] += lower[i - 1] * v[i - 1];
        }
    }
    out[0] += corners.0 * v[n - 1];
    out[n - 1] += corners.1 * v[0];
    out
}

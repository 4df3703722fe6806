//! GMRES with modified Gram–Schmidt Arnoldi and Givens-rotation least
//! squares, for complex matrix-free operators.

use num_complex::Complex64;

use super::{dot_conj, norm2, LinAlgError, LinearMap};

#[derive(Debug, Clone)]
pub struct GmresReport {
    pub solution: Vec<Complex64>,
    /// Relative residual after each Arnoldi step, starting with the initial
    /// residual (1 for a zero initial guess).
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub tolerance: f64,
}

impl GmresReport {
    /// Iterations needed to first reach the given relative residual, if any.
    pub fn iterations_to(&self, tol: f64) -> Option<usize> {
        self.residual_history.iter().position(|&r| r <= tol)
    }
}

/// Solves `A x = rhs` to the relative residual `tol` starting from zero.
///
/// `restart = None` runs full-memory GMRES (the problems here are small
/// enough that restarting is never needed; it exists for stress tests).
pub fn gmres(
    a: &dyn LinearMap,
    rhs: &[Complex64],
    tol: f64,
    max_iter: usize,
    restart: Option<usize>,
) -> Result<GmresReport, LinAlgError> {
    let n = a.dim();
    if rhs.len() != n {
        return Err(LinAlgError::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    if tol <= 0.0 || tol.is_nan() {
        return Err(LinAlgError::InvalidTolerance(tol));
    }
    let rhs_norm = norm2(rhs);
    if rhs_norm == 0.0 {
        return Err(LinAlgError::ZeroRhs);
    }

    let cycle_len = restart.unwrap_or(max_iter).max(1);
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut history = Vec::with_capacity(max_iter + 1);
    let mut total_iters = 0usize;
    let mut workspace = vec![Complex64::new(0.0, 0.0); n];

    loop {
        // Residual of the current iterate.
        a.apply(&x, &mut workspace);
        let mut residual: Vec<Complex64> =
            rhs.iter().zip(&workspace).map(|(b, ax)| b - ax).collect();
        let beta = norm2(&residual);
        if history.is_empty() {
            history.push(beta / rhs_norm);
        }
        if beta / rhs_norm <= tol {
            return Ok(GmresReport {
                solution: x,
                residual_history: history,
                iterations: total_iters,
                converged: true,
                tolerance: tol,
            });
        }
        if total_iters >= max_iter {
            return Ok(GmresReport {
                solution: x,
                residual_history: history,
                iterations: total_iters,
                converged: false,
                tolerance: tol,
            });
        }

        // Arnoldi cycle.
        for v in &mut residual {
            *v /= Complex64::new(beta, 0.0);
        }
        let mut basis: Vec<Vec<Complex64>> = vec![residual];
        let mut hess: Vec<Vec<Complex64>> = Vec::new(); // hess[k] = column k
        let mut cos = Vec::new();
        let mut sin: Vec<Complex64> = Vec::new();
        let mut g = vec![Complex64::new(0.0, 0.0); cycle_len + 1];
        g[0] = Complex64::new(beta, 0.0);

        let mut steps = 0usize;
        let mut happy_breakdown = false;

        for k in 0..cycle_len {
            if total_iters >= max_iter {
                break;
            }
            total_iters += 1;
            steps = k + 1;

            a.apply(&basis[k], &mut workspace);
            let mut w = workspace.clone();
            let mut column = Vec::with_capacity(k + 2);
            // Modified Gram–Schmidt.
            for basis_vec in basis.iter().take(k + 1) {
                let coeff = dot_conj(basis_vec, &w);
                for (wi, vi) in w.iter_mut().zip(basis_vec) {
                    *wi -= coeff * vi;
                }
                column.push(coeff);
            }
            let w_norm = norm2(&w);
            column.push(Complex64::new(w_norm, 0.0));

            // Apply the accumulated Givens rotations to the new column.
            for j in 0..k {
                let (cj, sj) = (cos[j], sin[j]);
                let temp = cj * column[j] + sj * column[j + 1];
                column[j + 1] = -sj.conj() * column[j] + cj * column[j + 1];
                column[j] = temp;
            }
            let (c, s) = givens(column[k], column[k + 1]);
            let temp = c * column[k] + s * column[k + 1];
            column[k] = temp;
            column[k + 1] = Complex64::new(0.0, 0.0);
            cos.push(c);
            sin.push(s);

            let g_next = -s.conj() * g[k] + c * g[k + 1];
            g[k] = c * g[k] + s * g[k + 1];
            g[k + 1] = g_next;

            hess.push(column);
            let rel_res = g[k + 1].norm() / rhs_norm;
            history.push(rel_res);

            if w_norm < 1e-14 * rhs_norm {
                // Happy breakdown: the Krylov space is invariant and the
                // projected solution is exact.
                happy_breakdown = true;
                break;
            }
            for v in &mut w {
                *v /= Complex64::new(w_norm, 0.0);
            }
            basis.push(w);

            if rel_res <= tol {
                break;
            }
        }

        // Solve the triangular system and update the iterate.
        let mut y = vec![Complex64::new(0.0, 0.0); steps];
        for i in (0..steps).rev() {
            let mut sum = g[i];
            for j in i + 1..steps {
                sum -= hess[j][i] * y[j];
            }
            y[i] = sum / hess[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&basis[j]) {
                *xi += yj * vi;
            }
        }

        let current = *history.last().unwrap();
        if current <= tol || happy_breakdown || total_iters >= max_iter {
            // Recompute the true residual for the returned flag.
            a.apply(&x, &mut workspace);
            let true_res = rhs
                .iter()
                .zip(&workspace)
                .map(|(b, ax)| (b - ax).norm_sqr())
                .sum::<f64>()
                .sqrt()
                / rhs_norm;
            return Ok(GmresReport {
                solution: x,
                residual_history: history,
                iterations: total_iters,
                converged: true_res <= tol,
                tolerance: tol,
            });
        }
    }
}

/// Complex Givens rotation eliminating `b`: returns `(c, s)` with real `c`
/// such that `conj([c, s])·[a, b]ᵀ = r` and `[-conj(s), c]·[a, b]ᵀ = 0`.
fn givens(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let a_mag = a.norm();
    let b_mag = b.norm();
    if b_mag == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    if a_mag == 0.0 {
        return (Complex64::new(0.0, 0.0), b.conj() / b.norm());
    }
    let r = (a_mag * a_mag + b_mag * b_mag).sqrt();
    let c = Complex64::new(a_mag / r, 0.0);
    let s = (a / a_mag) * b.conj() / r;
    (c, s)
}

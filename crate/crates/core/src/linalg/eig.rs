//! Dense nonsymmetric complex eigenvalues: Householder reduction to upper
//! Hessenberg form followed by an implicitly shifted single-shift QR
//! iteration with Wilkinson shifts and aggressive 1x1/2x2 deflation.

use num_complex::Complex64;

use super::{CMatrix, LinAlgError};

/// Hard cap matching what a desk-scale dense eigensolve tolerates.
pub const MAX_DENSE_DIM: usize = 4096;

/// All eigenvalues of a square complex matrix (unordered).
pub fn eigenvalues(matrix: &CMatrix) -> Result<Vec<Complex64>, LinAlgError> {
    assert_eq!(matrix.n_rows(), matrix.n_cols(), "square matrix required");
    let n = matrix.n_rows();
    if n > MAX_DENSE_DIM {
        return Err(LinAlgError::SizeLimit(n, MAX_DENSE_DIM));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![matrix[(0, 0)]]);
    }

    let mut h = matrix.clone();
    hessenberg_in_place(&mut h);
    qr_eigenvalues(&mut h)
}

/// Spectral condition number `max|λ| / min|λ|`; infinite when the spectrum
/// touches zero.
pub fn spectral_condition_number(eigenvalues: &[Complex64]) -> f64 {
    assert!(!eigenvalues.is_empty(), "empty spectrum");
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for e in eigenvalues {
        let mag = e.norm();
        lo = lo.min(mag);
        hi = hi.max(mag);
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Singular-value condition number computed as
/// `sqrt(cond(AᴴA))`; a diagnostic companion to the spectral one (squaring
/// the matrix halves the attainable accuracy, which is fine for reporting).
pub fn singular_value_condition_number(matrix: &CMatrix) -> Result<f64, LinAlgError> {
    let gram = matrix.adjoint_times_self();
    let eigs = eigenvalues(&gram)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for e in &eigs {
        // Hermitian PSD spectrum up to rounding.
        let mag = e.re.max(0.0);
        lo = lo.min(mag);
        hi = hi.max(mag);
    }
    if lo == 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok((hi / lo).sqrt())
    }
}

/// In-place unitary reduction to upper Hessenberg form (eigenvalues only,
/// no transform accumulation).
fn hessenberg_in_place(h: &mut CMatrix) {
    let n = h.n_rows();
    let mut v = vec![Complex64::new(0.0, 0.0); n];

    for col in 0..n.saturating_sub(2) {
        // Householder vector for the column below the subdiagonal.
        let mut norm_sq = 0.0;
        for row in col + 1..n {
            norm_sq += h[(row, col)].norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm < 1e-300 {
            continue;
        }
        let x0 = h[(col + 1, col)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;

        let mut v_norm_sq = 0.0;
        for row in col + 1..n {
            let val = if row == col + 1 {
                h[(row, col)] - alpha
            } else {
                h[(row, col)]
            };
            v[row] = val;
            v_norm_sq += val.norm_sqr();
        }
        if v_norm_sq < 1e-300 {
            continue;
        }
        let tau = 2.0 / v_norm_sq;

        // Left update: rows col+1..n of columns col..n.
        for j in col..n {
            let mut s = Complex64::new(0.0, 0.0);
            for row in col + 1..n {
                s += v[row].conj() * h[(row, j)];
            }
            s *= tau;
            for row in col + 1..n {
                let sub = s * v[row];
                h[(row, j)] -= sub;
            }
        }
        // Right update: columns col+1..n of all rows.
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in col + 1..n {
                s += h[(i, j)] * v[j];
            }
            s *= tau;
            for j in col + 1..n {
                let sub = s * v[j].conj();
                h[(i, j)] -= sub;
            }
        }

        h[(col + 1, col)] = alpha;
        for row in col + 2..n {
            h[(row, col)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Implicitly shifted QR on an upper Hessenberg matrix.
fn qr_eigenvalues(h: &mut CMatrix) -> Result<Vec<Complex64>, LinAlgError> {
    let n = h.n_rows();
    let mut eigs = Vec::with_capacity(n);
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;

    let mut hi = n - 1;
    let mut iters_at_hi = 0usize;
    const MAX_ITERS_PER_EIG: usize = 60;

    'outer: loop {
        // Deflate every negligible subdiagonal below `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let local = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let tst = if local > 0.0 { local } else { scale };
            // Plain criterion, plus the Ahues–Tisseur product criterion,
            // which recognizes converged clusters whose diagonal scale sits
            // far below the matrix norm (rotations passing through leave
            // O(eps·‖H‖) dust there that the local test alone never accepts).
            let super_entry = h[(lo - 1, lo)].norm();
            let diag_mag = h[(lo, lo)].norm().max(eps * tst);
            if sub <= eps * tst || sub * super_entry <= eps * diag_mag * tst {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }

        if lo == hi {
            // 1x1 block.
            eigs.push(h[(hi, hi)]);
            if hi == 0 {
                break 'outer;
            }
            hi -= 1;
            iters_at_hi = 0;
            continue;
        }
        if lo == hi - 1 {
            // 2x2 block: close directly.
            let (e1, e2) = eig_2x2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            eigs.push(e1);
            eigs.push(e2);
            if lo == 0 {
                break 'outer;
            }
            hi = lo - 1;
            iters_at_hi = 0;
            continue;
        }

        iters_at_hi += 1;
        if iters_at_hi > MAX_ITERS_PER_EIG {
            return Err(LinAlgError::QrNoConvergence(hi - lo + 1));
        }

        // Wilkinson shift, with an occasional exceptional shift to break
        // symmetry-induced stalls.
        let sigma = if iters_at_hi.is_multiple_of(12) {
            h[(hi, hi)] + Complex64::new(0.751, 0.431) * h[(hi, hi - 1)].norm()
        } else {
            let (e1, e2) = eig_2x2(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            );
            let d = h[(hi, hi)];
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };

        single_shift_sweep(h, lo, hi, sigma);
    }

    Ok(eigs)
}

/// Eigenvalues of `[[a, b], [c, d]]`.
fn eig_2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let half_trace = 0.5 * (a + d);
    let det = a * d - b * c;
    let disc = (half_trace * half_trace - det).sqrt();
    (half_trace + disc, half_trace - disc)
}

/// One implicit single-shift bulge chase over the active block `[lo, hi]`.
fn single_shift_sweep(h: &mut CMatrix, lo: usize, hi: usize, sigma: Complex64) {
    let mut x = h[(lo, lo)] - sigma;
    let mut y = h[(lo + 1, lo)];

    for k in lo..hi {
        let (c, s) = givens(x, y);
        let s_conj = s.conj();

        // Left rotation on rows k, k+1 (columns from the bulge onward).
        let col_start = if k > lo { k - 1 } else { lo };
        for j in col_start..=hi {
            let t1 = h[(k, j)];
            let t2 = h[(k + 1, j)];
            h[(k, j)] = c * t1 + s * t2;
            h[(k + 1, j)] = -s_conj * t1 + c * t2;
        }
        // Right rotation on columns k, k+1.
        let row_end = hi.min(k + 2);
        for i in lo..=row_end {
            let t1 = h[(i, k)];
            let t2 = h[(i, k + 1)];
            h[(i, k)] = c * t1 + s_conj * t2;
            h[(i, k + 1)] = -s * t1 + c * t2;
        }

        if k + 1 < hi {
            x = h[(k + 1, k)];
            y = h[(k + 2, k)];
        }
    }
}

/// Complex Givens rotation with real cosine: zeroes the second component.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let a_mag = a.norm();
    let b_mag = b.norm();
    if b_mag == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if a_mag == 0.0 {
        return (0.0, b.conj() / b_mag);
    }
    let r = a_mag.hypot(b_mag);
    let c = a_mag / r;
    let s = (a / a_mag) * (b.conj() / r);
    (c, s)
}

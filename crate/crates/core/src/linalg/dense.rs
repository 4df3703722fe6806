//! Dense complex matrices (row-major), with a pivoted LU used for direct
//! solves and determinants.

use num_complex::Complex64;

use super::{LinAlgError, LinearMap};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![Complex64::new(0.0, 0.0); n_rows * n_cols],
        }
    }

    pub fn from_fn(
        n_rows: usize,
        n_cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    /// Writes `v` into column `j`.
    pub fn set_column(&mut self, j: usize, v: &[Complex64]) {
        assert_eq!(v.len(), self.n_rows);
        for (i, &value) in v.iter().enumerate() {
            self[(i, j)] = value;
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<Complex64>()
            })
            .collect()
    }

    /// `Aᴴ·A`, used for the singular-value condition diagnostic.
    pub fn adjoint_times_self(&self) -> CMatrix {
        let n = self.n_cols;
        let mut out = CMatrix::zeros(n, n);
        for k in 0..self.n_rows {
            let row = self.row(k);
            for i in 0..n {
                let conj_ki = row[i].conj();
                let out_row = out.row_mut(i);
                for j in 0..n {
                    out_row[j] += conj_ki * row[j];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n_rows.min(self.n_cols))
            .map(|i| self[(i, i)])
            .sum()
    }

    /// Pivoted LU decomposition (square matrices).
    pub fn lu(&self) -> Result<LuDecomposition, LinAlgError> {
        assert_eq!(self.n_rows, self.n_cols, "LU needs a square matrix");
        let n = self.n_rows;
        let mut lu = self.clone();
        let mut pivots = vec![0usize; n];
        let mut swaps = 0usize;
        let scale = self.frobenius_norm().max(f64::MIN_POSITIVE);

        for col in 0..n {
            let (mut best, mut best_mag) = (col, lu[(col, col)].norm());
            for row in col + 1..n {
                let mag = lu[(row, col)].norm();
                if mag > best_mag {
                    best = row;
                    best_mag = mag;
                }
            }
            if best_mag < 1e-15 * scale {
                return Err(LinAlgError::Singular { pivot: best_mag });
            }
            if best != col {
                for j in 0..n {
                    let tmp = lu[(col, j)];
                    lu[(col, j)] = lu[(best, j)];
                    lu[(best, j)] = tmp;
                }
                swaps += 1;
            }
            pivots[col] = best;
            let inv_pivot = Complex64::new(1.0, 0.0) / lu[(col, col)];
            for row in col + 1..n {
                let factor = lu[(row, col)] * inv_pivot;
                lu[(row, col)] = factor;
                for j in col + 1..n {
                    let sub = factor * lu[(col, j)];
                    lu[(row, j)] -= sub;
                }
            }
        }

        Ok(LuDecomposition { lu, pivots, swaps })
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n_cols + j]
    }
}

impl LinearMap for CMatrix {
    fn dim(&self) -> usize {
        self.n_rows
    }

    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self
                .row(i)
                .iter()
                .zip(v)
                .map(|(a, x)| a * x)
                .sum::<Complex64>();
        }
    }
}

#[derive(Debug, Clone)]
pub struct LuDecomposition {
    lu: CMatrix,
    pivots: Vec<usize>,
    swaps: usize,
}

impl LuDecomposition {
    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.n_rows;
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        for i in 0..n {
            x.swap(i, self.pivots[i]);
        }
        // Forward substitution with unit diagonal L.
        for i in 1..n {
            let (head, tail) = x.split_at_mut(i);
            let row = self.lu.row(i);
            let correction: Complex64 = row[..i].iter().zip(head.iter()).map(|(l, v)| l * v).sum();
            tail[0] -= correction;
        }
        // Back substitution with U.
        for i in (0..n).rev() {
            let (head, tail) = x.split_at_mut(i + 1);
            let row = self.lu.row(i);
            let correction: Complex64 = row[i + 1..]
                .iter()
                .zip(tail.iter())
                .map(|(l, v)| l * v)
                .sum();
            head[i] = (head[i] - correction) / row[i];
        }
        x
    }

    pub fn determinant(&self) -> Complex64 {
        let sign = if self.swaps.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        (0..self.lu.n_rows)
            .map(|i| self.lu[(i, i)])
            .fold(Complex64::new(sign, 0.0), |acc, d| acc * d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lu_solves_small_system() {
        let mut a = CMatrix::from_fn(3, 3, |i, j| {
            c((i * 3 + j + 1) as f64, (i as f64) - (j as f64))
        });
        for i in 0..3 {
            a[(i, i)] += c(10.0, 0.0); // keep it well conditioned
        }
        let x_true = vec![c(1.0, 2.0), c(-0.5, 0.25), c(3.0, -1.0)];
        let b = a.mul_vec(&x_true);
        let x = a.lu().unwrap().solve(&b);
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).norm() < 1e-12);
        }
    }

    #[test]
    fn determinant_of_diagonal() {
        let mut a = CMatrix::zeros(3, 3);
        a[(0, 0)] = c(2.0, 0.0);
        a[(1, 1)] = c(0.0, 1.0);
        a[(2, 2)] = c(-1.0, 0.0);
        let det = a.lu().unwrap().determinant();
        assert!((det - c(0.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_detected() {
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = c(1.0, 0.0);
        a[(0, 1)] = c(2.0, 0.0);
        a[(1, 0)] = c(2.0, 0.0);
        a[(1, 1)] = c(4.0, 0.0);
        assert!(matches!(a.lu(), Err(LinAlgError::Singular { .. })));
    }
}

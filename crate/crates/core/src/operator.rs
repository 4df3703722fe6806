//! The discrete virtual-source operator: collocation of the combined layer
//! potential with displaced sources at the quadrature nodes, the
//! preconditioned composition, exterior field evaluation, and dense
//! assembly for spectral studies.

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{GeometryError, Mesh, Point2};
use crate::kernels::{self, KernelError};
use crate::linalg::{CMatrix, LinAlgError, LinearMap};
use crate::osrc::{OsrcError, OsrcOperator, PadeCoefficients, PeriodicFem};
use crate::reference::{self, ReferenceError};

#[derive(Debug, Clone, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Osrc(#[from] OsrcError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Reference(#[from] ReferenceError),
    #[error("vector length {got} does not match the {expected}-node mesh")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("target point {index} lies inside the boundary")]
    TargetInsideBoundary { index: usize },
    #[error("dense assembly limited to {limit} unknowns, mesh has {n}")]
    SizeLimit { n: usize, limit: usize },
    #[error("exact radiation map requires a circle mesh: {0}")]
    GeometryMismatch(String),
}

/// How the Dirichlet-to-Neumann action inside the operator is realized.
#[derive(Debug, Clone)]
pub enum DtnMode {
    /// Rotated-Padé on-surface radiation operator (the production path).
    Osrc,
    /// Exact circle eigenvalues applied in the discrete Fourier basis;
    /// verification only.
    ExactCircle { radius: f64 },
}

/// Which operator to assemble densely.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// The bare virtual-source operator `A_N`.
    Plain,
    /// The preconditioned composition `B_N A_N`.
    Preconditioned,
}

/// Parameters of the radiation operator embedded in the layer combination.
#[derive(Debug, Clone, Copy)]
pub struct OsrcParams {
    pub terms: usize,
    pub angle: f64,
    pub damping: f64,
}

impl Default for OsrcParams {
    fn default() -> Self {
        Self {
            terms: 4,
            angle: std::f64::consts::FRAC_PI_2,
            damping: 0.0,
        }
    }
}

pub struct VirtualSourceOperator {
    mesh: Mesh,
    osrc: OsrcOperator,
    dtn: DtnMode,
    /// Quadrature weight times parallel-curve factor: `α_n (1 − h κ_n)`.
    weights: Vec<f64>,
    /// `K_S(x_m, z_n)` at collocation points `x_m = y_m`.
    single: CMatrix,
    /// `K_D(x_m, z_n)` with the boundary normal `ν(y_n)`.
    double: CMatrix,
    /// Exact-circle eigenvalues per DFT mode index (only in exact mode).
    exact_symbols: Option<Vec<Complex64>>,
}

impl VirtualSourceOperator {
    /// Builds the operator for a mesh with positive displacement; the kernel
    /// tables are dense but every entry is smooth and finite because the
    /// sources sit strictly inside the boundary.
    pub fn new(mesh: Mesh, params: OsrcParams) -> Result<Self, OperatorError> {
        let n = mesh.len();
        let k = mesh.wavenumber();

        let fem = PeriodicFem::from_mesh(&mesh)?;
        let pade = PadeCoefficients::rotated(params.terms, params.angle)?;
        let osrc = OsrcOperator::new(fem, pade, k).with_damping(params.damping);

        let weights: Vec<f64> = mesh
            .weights()
            .iter()
            .zip(mesh.element_factors())
            .map(|(&alpha, &factor)| alpha * factor)
            .collect();

        let mut single = CMatrix::zeros(n, n);
        let mut double = CMatrix::zeros(n, n);
        let nodes = mesh.nodes();
        let sources = mesh.sources();
        let normals = mesh.normals();
        for m in 0..n {
            let x = nodes[m];
            for j in 0..n {
                let (ks, kd) = kernels::kernel_pair(k, x, sources[j], normals[j])?;
                single[(m, j)] = ks;
                double[(m, j)] = kd;
            }
        }

        Ok(Self {
            mesh,
            osrc,
            dtn: DtnMode::Osrc,
            weights,
            single,
            double,
            exact_symbols: None,
        })
    }

    /// Returns a copy of the operator with a different radiation map.
    pub fn with_dtn(&self, mode: DtnMode) -> Result<Self, OperatorError> {
        let exact_symbols = match &mode {
            DtnMode::Osrc => None,
            DtnMode::ExactCircle { radius } => {
                let mesh_radius = self.mesh.curve().circle_radius().ok_or_else(|| {
                    OperatorError::GeometryMismatch("mesh curve is not a circle".into())
                })?;
                if (mesh_radius - radius).abs() > 1e-12 * radius.max(1.0) {
                    return Err(OperatorError::GeometryMismatch(format!(
                        "mesh circle radius {mesh_radius} does not match requested {radius}"
                    )));
                }
                let n = self.mesh.len();
                let k = self.mesh.wavenumber();
                // The propagation identity behind this verification mode
                // treats the density as Dirichlet data of the radiating
                // field on the source circle, so the map is the exact DtN
                // of the circle the sources actually live on.
                let source_radius = radius - self.mesh.displacement();
                let mut symbols = Vec::with_capacity(n);
                for m in 0..n {
                    let signed = if m <= n / 2 {
                        m as i64
                    } else {
                        m as i64 - n as i64
                    };
                    symbols.push(reference::circle_exact_dtn_eigenvalue(
                        k,
                        source_radius,
                        signed,
                    )?);
                }
                Some(symbols)
            }
        };
        Ok(Self {
            mesh: self.mesh.clone(),
            osrc: self.osrc.clone(),
            dtn: mode,
            weights: self.weights.clone(),
            single: self.single.clone(),
            double: self.double.clone(),
            exact_symbols,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn osrc(&self) -> &OsrcOperator {
        &self.osrc
    }

    pub fn dim(&self) -> usize {
        self.mesh.len()
    }

    fn check_dim(&self, v: &[Complex64]) -> Result<(), OperatorError> {
        if v.len() != self.dim() {
            return Err(OperatorError::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Applies the configured radiation map to a nodal vector.
    fn apply_dtn(&self, v: &[Complex64]) -> Result<Vec<Complex64>, OperatorError> {
        match &self.dtn {
            DtnMode::Osrc => Ok(self.osrc.apply(v)?),
            DtnMode::ExactCircle { .. } => {
                let symbols = self
                    .exact_symbols
                    .as_ref()
                    .expect("exact mode always precomputes symbols");
                Ok(dft_multiplier(v, symbols))
            }
        }
    }

    /// `A_N v`: for each collocation point `x_m`,
    /// `Σ_n w_n [K_D(x_m, z_n) v_n − K_S(x_m, z_n) (Λv)_n]`.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>, OperatorError> {
        self.check_dim(v)?;
        let lambda_v = self.apply_dtn(v)?;
        let n = self.dim();

        let weighted_v: Vec<Complex64> = v
            .iter()
            .zip(&self.weights)
            .map(|(&vi, &w)| w * vi)
            .collect();
        let weighted_lv: Vec<Complex64> = lambda_v
            .iter()
            .zip(&self.weights)
            .map(|(&li, &w)| w * li)
            .collect();

        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (m, slot) in out.iter_mut().enumerate() {
            let dr = self.double.row(m);
            let sr = self.single.row(m);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += dr[j] * weighted_v[j] - sr[j] * weighted_lv[j];
            }
            *slot = acc;
        }
        Ok(out)
    }

    /// `B_N A_N v`.
    pub fn apply_preconditioned(&self, v: &[Complex64]) -> Result<Vec<Complex64>, OperatorError> {
        let av = self.apply(v)?;
        Ok(self
            .osrc
            .apply_preconditioner(self.mesh.displacement(), &av)?)
    }

    /// `B_N f`: the preconditioner applied to nodal boundary data.
    pub fn preconditioned_rhs(&self, f: &[Complex64]) -> Result<Vec<Complex64>, OperatorError> {
        self.check_dim(f)?;
        Ok(self
            .osrc
            .apply_preconditioner(self.mesh.displacement(), f)?)
    }

    /// Evaluates the represented field at exterior targets.
    pub fn evaluate_field(
        &self,
        v: &[Complex64],
        targets: &[Point2],
    ) -> Result<Vec<Complex64>, OperatorError> {
        self.check_dim(v)?;
        for (index, target) in targets.iter().enumerate() {
            if self.mesh.contains(*target) {
                return Err(OperatorError::TargetInsideBoundary { index });
            }
        }
        let lambda_v = self.apply_dtn(v)?;
        let k = self.mesh.wavenumber();
        let sources = self.mesh.sources();
        let normals = self.mesh.normals();

        let mut out = Vec::with_capacity(targets.len());
        for &x in targets {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.dim() {
                let (ks, kd) = kernels::kernel_pair(k, x, sources[j], normals[j])?;
                acc += self.weights[j] * (kd * v[j] - ks * lambda_v[j]);
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Dense assembly by applying the operator to the standard basis.
    pub fn assemble_dense(&self, kind: OperatorKind) -> Result<CMatrix, OperatorError> {
        let n = self.dim();
        if n > crate::linalg::MAX_DENSE_DIM {
            return Err(OperatorError::SizeLimit {
                n,
                limit: crate::linalg::MAX_DENSE_DIM,
            });
        }
        let mut dense = CMatrix::zeros(n, n);
        let mut basis = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            basis[j] = Complex64::new(1.0, 0.0);
            let column = match kind {
                OperatorKind::Plain => self.apply(&basis)?,
                OperatorKind::Preconditioned => self.apply_preconditioned(&basis)?,
            };
            dense.set_column(j, &column);
            basis[j] = Complex64::new(0.0, 0.0);
        }
        Ok(dense)
    }
}

/// Applies a Fourier multiplier through the plain DFT on the uniform grid.
fn dft_multiplier(v: &[Complex64], symbols: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    // Twiddle table e^{2πi j/N}; indices reduced mod N keep full accuracy.
    let twiddle: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64))
        .collect();

    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (m, cm) in coeffs.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &vj) in v.iter().enumerate() {
            acc += vj * twiddle[(n - (m * j) % n) % n];
        }
        *cm = acc * symbols[m] / n as f64;
    }

    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, &cm) in coeffs.iter().enumerate() {
            acc += cm * twiddle[(m * j) % n];
        }
        *slot = acc;
    }
    out
}

/// Matrix-free adapter for the bare operator.
pub struct PlainMap<'a>(pub &'a VirtualSourceOperator);

impl LinearMap for PlainMap<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let result = self
            .0
            .apply(v)
            .expect("operator apply cannot fail on matching dims");
        out.copy_from_slice(&result);
    }
}

/// Matrix-free adapter for the preconditioned operator.
pub struct PreconditionedMap<'a>(pub &'a VirtualSourceOperator);

impl LinearMap for PreconditionedMap<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let result = self
            .0
            .apply_preconditioned(v)
            .expect("operator apply cannot fail on matching dims");
        out.copy_from_slice(&result);
    }
}

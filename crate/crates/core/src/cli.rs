//! Experiment drivers: the manufactured radiating test, the plane-wave
//! circle benchmark, spectrum studies, refinement tables, and CSV/JSON
//! reporting. Every run is deterministic for a given configuration.

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{self, BoundaryCurve, GeometryError, Mesh, Point2};
use crate::linalg::{self, LinAlgError};
use crate::operator::{
    OperatorError, OperatorKind, OsrcParams, PreconditionedMap, VirtualSourceOperator,
};
use crate::reference::{self, ReferenceError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Reference(#[from] ReferenceError),
    #[error("vectors must have equal nonzero length")]
    LengthMismatch,
    #[error("exact field vanishes; relative error undefined")]
    ZeroDenominator,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Geometry selection mirroring the CLI flag.
#[derive(Debug, Clone, Serialize)]
pub enum GeometryChoice {
    Flower,
    Circle { radius: f64 },
    File { path: String },
}

impl GeometryChoice {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text == "flower" {
            return Ok(Self::Flower);
        }
        if let Some(radius) = text.strip_prefix("circle:") {
            let radius: f64 = radius
                .parse()
                .map_err(|e| CliError::InvalidConfig(format!("bad circle radius: {e}")))?;
            if radius <= 0.0 {
                return Err(CliError::InvalidConfig(
                    "circle radius must be positive".into(),
                ));
            }
            return Ok(Self::Circle { radius });
        }
        if let Some(path) = text.strip_prefix("file:") {
            return Ok(Self::File { path: path.into() });
        }
        Err(CliError::InvalidConfig(format!(
            "unknown geometry `{text}` (expected flower | circle:R | file:PATH)"
        )))
    }

    pub fn build(&self) -> Result<BoundaryCurve, CliError> {
        match self {
            Self::Flower => Ok(BoundaryCurve::flower()),
            Self::Circle { radius } => Ok(BoundaryCurve::circle(*radius)),
            Self::File { path } => {
                let text = std::fs::read_to_string(path)?;
                Ok(BoundaryCurve::from_coefficient_text(&text)?)
            }
        }
    }
}

/// Full description of one experiment run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub geometry: GeometryChoice,
    pub wavenumber: f64,
    pub elements_per_wavelength: u32,
    pub beta: f64,
    /// Scale `c` in `h = c·λ/N_λ^β`. `None` picks `c = 12^{β−1}` so the
    /// base refinement `N_λ = 12` always uses `h = λ/12`.
    pub h_scale: Option<f64>,
    pub pade_terms: usize,
    pub pade_angle: f64,
    pub damping: f64,
    pub gmres_tolerance: f64,
    pub gmres_max_iterations: usize,
    pub gmres_restart: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            geometry: GeometryChoice::Flower,
            wavenumber: 4.0 * std::f64::consts::PI,
            elements_per_wavelength: 12,
            beta: 1.0,
            h_scale: None,
            pade_terms: 4,
            pade_angle: std::f64::consts::FRAC_PI_2,
            damping: 0.0,
            gmres_tolerance: 1e-10,
            gmres_max_iterations: 500,
            gmres_restart: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.wavenumber <= 0.0 || self.wavenumber.is_nan() {
            return Err(CliError::InvalidConfig(
                "wavenumber must be positive".into(),
            ));
        }
        if self.elements_per_wavelength < 2 {
            return Err(CliError::InvalidConfig(
                "elements per wavelength must be at least 2".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(CliError::InvalidConfig("beta must lie in [0, 1]".into()));
        }
        if self.gmres_tolerance <= 0.0 || self.gmres_tolerance.is_nan() {
            return Err(CliError::InvalidConfig("tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavenumber
    }

    /// The displacement for this configuration, honoring the convention
    /// that the `N_λ = 12` row of every β-column uses `h = λ/12`.
    pub fn displacement(&self) -> f64 {
        let scale = self
            .h_scale
            .unwrap_or_else(|| 12.0_f64.powf(self.beta - 1.0));
        geometry::displacement(
            self.wavelength(),
            self.elements_per_wavelength,
            self.beta,
            scale,
        )
    }

    fn osrc_params(&self) -> OsrcParams {
        OsrcParams {
            terms: self.pade_terms,
            angle: self.pade_angle,
            damping: self.damping,
        }
    }

    /// Builds the mesh and operator for this configuration.
    pub fn build_operator(&self) -> Result<VirtualSourceOperator, CliError> {
        self.validate()?;
        let curve = self.geometry.build()?;
        let mesh = Mesh::build(
            &curve,
            self.wavenumber,
            self.elements_per_wavelength,
            self.displacement(),
        )?;
        Ok(VirtualSourceOperator::new(mesh, self.osrc_params())?)
    }
}

/// Discrete relative error exactly as reported:
/// `Σ|numeric − exact|² / Σ|exact|²` (no square root).
pub fn relative_error(numeric: &[Complex64], exact: &[Complex64]) -> Result<f64, CliError> {
    if numeric.len() != exact.len() || numeric.is_empty() {
        return Err(CliError::LengthMismatch);
    }
    let denom: f64 = exact.iter().map(|z| z.norm_sqr()).sum();
    if denom == 0.0 {
        return Err(CliError::ZeroDenominator);
    }
    let num: f64 = numeric
        .iter()
        .zip(exact)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    Ok(num / denom)
}

/// Phase timings of a solve, in seconds.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub build: f64,
    pub solve: f64,
    pub evaluate: f64,
    pub spectrum: f64,
}

/// Everything a solve produces.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub n: usize,
    pub displacement: f64,
    pub density_re: Vec<f64>,
    pub density_im: Vec<f64>,
    /// Squared-norm ratio form of the relative error.
    pub relative_error: Option<f64>,
    /// Square-rooted variant (the usual l² relative error).
    pub relative_error_sqrt: Option<f64>,
    pub gmres_iterations: usize,
    pub gmres_converged: bool,
    pub gmres_residuals: Vec<f64>,
    /// Spectral condition number max|λ|/min|λ| (from a dense eigensolve).
    pub condition_number: Option<f64>,
    /// Singular-value condition number (diagnostic companion).
    pub condition_number_sv: Option<f64>,
    pub eigenvalues_re: Vec<f64>,
    pub eigenvalues_im: Vec<f64>,
    pub timings: Timings,
    /// Probe layout used for the error: points, numeric field, exact field.
    #[serde(skip)]
    pub probes: Vec<(Point2, Complex64, Complex64)>,
}

impl SolveReport {
    fn empty(n: usize, displacement: f64) -> Self {
        Self {
            n,
            displacement,
            density_re: Vec::new(),
            density_im: Vec::new(),
            relative_error: None,
            relative_error_sqrt: None,
            gmres_iterations: 0,
            gmres_converged: false,
            gmres_residuals: Vec::new(),
            condition_number: None,
            condition_number_sv: None,
            eigenvalues_re: Vec::new(),
            eigenvalues_im: Vec::new(),
            timings: Timings::default(),
            probes: Vec::new(),
        }
    }

    fn store_density(&mut self, density: &[Complex64]) {
        self.density_re = density.iter().map(|z| z.re).collect();
        self.density_im = density.iter().map(|z| z.im).collect();
    }
}

/// Solves `B A v = B f` for given nodal Dirichlet data and evaluates the
/// field at probe points with exact values supplied by `exact`.
fn solve_and_probe(
    op: &VirtualSourceOperator,
    config: &ExperimentConfig,
    boundary_data: &[Complex64],
    exact: impl Fn(Point2) -> Result<Complex64, CliError>,
    report: &mut SolveReport,
) -> Result<Vec<Complex64>, CliError> {
    let t0 = Instant::now();
    let rhs = op.preconditioned_rhs(boundary_data)?;
    let gmres_report = linalg::gmres(
        &PreconditionedMap(op),
        &rhs,
        config.gmres_tolerance,
        config.gmres_max_iterations,
        config.gmres_restart,
    )?;
    report.timings.solve = t0.elapsed().as_secs_f64();
    report.gmres_iterations = gmres_report.iterations;
    report.gmres_converged = gmres_report.converged;
    report.gmres_residuals = gmres_report.residual_history.clone();
    report.store_density(&gmres_report.solution);

    let t1 = Instant::now();
    let probes = op.mesh().outward_probe_points(config.wavelength() / 4.0);
    let numeric = op.evaluate_field(&gmres_report.solution, &probes)?;
    let exact_values: Vec<Complex64> =
        probes.iter().map(|&p| exact(p)).collect::<Result<_, _>>()?;
    report.timings.evaluate = t1.elapsed().as_secs_f64();

    let err = relative_error(&numeric, &exact_values)?;
    report.relative_error = Some(err);
    report.relative_error_sqrt = Some(err.sqrt());
    report.probes = probes
        .iter()
        .zip(numeric.iter().zip(&exact_values))
        .map(|(&p, (&n, &e))| (p, n, e))
        .collect();

    Ok(gmres_report.solution)
}

/// Manufactured radiating solution: Dirichlet data from the four-source
/// field, error measured against the same field on the outward parallel
/// probe curve at distance λ/4.
pub fn run_manufactured(config: &ExperimentConfig) -> Result<SolveReport, CliError> {
    let t0 = Instant::now();
    let op = config.build_operator()?;
    let k = config.wavenumber;

    // All four sources must be enclosed for F to radiate in the exterior.
    for (i, s) in reference::manufactured_sources().into_iter().enumerate() {
        if !op.mesh().contains(s) {
            return Err(CliError::InvalidConfig(format!(
                "geometry does not enclose manufactured source {i}"
            )));
        }
    }

    let boundary_data: Vec<Complex64> = op
        .mesh()
        .nodes()
        .iter()
        .map(|&y| reference::manufactured_field(k, y))
        .collect::<Result<_, _>>()?;

    let mut report = SolveReport::empty(op.dim(), op.mesh().displacement());
    report.timings.build = t0.elapsed().as_secs_f64();
    solve_and_probe(
        &op,
        config,
        &boundary_data,
        |p| Ok(reference::manufactured_field(k, p)?),
        &mut report,
    )?;
    Ok(report)
}

/// Plane-wave scattering by a sound-soft circle: `f = −e^{ikx}` on the
/// boundary, scattered field compared against the separable series.
pub fn run_planewave(config: &ExperimentConfig) -> Result<SolveReport, CliError> {
    let radius = match config.geometry {
        GeometryChoice::Circle { radius } => radius,
        _ => {
            return Err(CliError::InvalidConfig(
                "the plane-wave benchmark needs --geometry circle:R".into(),
            ))
        }
    };
    let t0 = Instant::now();
    let op = config.build_operator()?;
    let k = config.wavenumber;

    let boundary_data: Vec<Complex64> = op
        .mesh()
        .nodes()
        .iter()
        .map(|y| -Complex64::from_polar(1.0, k * y.x))
        .collect();

    let mut report = SolveReport::empty(op.dim(), op.mesh().displacement());
    report.timings.build = t0.elapsed().as_secs_f64();
    solve_and_probe(
        &op,
        config,
        &boundary_data,
        |p| Ok(reference::mie_soft_circle(k, radius, p)?.scattered),
        &mut report,
    )?;
    Ok(report)
}

/// Dense spectrum of `B_N A_N` (or `A_N`) with both condition numbers.
pub fn run_spectrum(
    config: &ExperimentConfig,
    kind: OperatorKind,
) -> Result<SolveReport, CliError> {
    let t0 = Instant::now();
    let op = config.build_operator()?;
    let mut report = SolveReport::empty(op.dim(), op.mesh().displacement());
    report.timings.build = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let dense = op.assemble_dense(kind)?;
    let eigs = linalg::eigenvalues(&dense)?;
    report.timings.spectrum = t1.elapsed().as_secs_f64();

    report.condition_number = Some(linalg::spectral_condition_number(&eigs));
    report.condition_number_sv = Some(linalg::singular_value_condition_number(&dense)?);
    report.eigenvalues_re = eigs.iter().map(|z| z.re).collect();
    report.eigenvalues_im = eigs.iter().map(|z| z.im).collect();
    Ok(report)
}

/// One row of the refinement table.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub elements_per_wavelength: u32,
    pub beta: f64,
    pub displacement: f64,
    pub n: usize,
    pub condition_number: f64,
    pub relative_error: f64,
    pub relative_error_sqrt: f64,
    pub gmres_iterations: usize,
    pub seconds: f64,
}

/// Condition-number and accuracy sweep over refinements and β choices.
pub fn run_table(
    base: &ExperimentConfig,
    refinements: &[u32],
    betas: &[f64],
) -> Result<Vec<TableRow>, CliError> {
    let mut rows = Vec::new();
    for &beta in betas {
        for &n_lambda in refinements {
            let config = ExperimentConfig {
                elements_per_wavelength: n_lambda,
                beta,
                ..base.clone()
            };
            let t0 = Instant::now();
            let solve = run_manufactured(&config)?;
            let spectrum = run_spectrum(&config, OperatorKind::Preconditioned)?;
            rows.push(TableRow {
                elements_per_wavelength: n_lambda,
                beta,
                displacement: config.displacement(),
                n: solve.n,
                condition_number: spectrum.condition_number.unwrap_or(f64::NAN),
                relative_error: solve.relative_error.unwrap_or(f64::NAN),
                relative_error_sqrt: solve.relative_error_sqrt.unwrap_or(f64::NAN),
                gmres_iterations: solve.gmres_iterations,
                seconds: t0.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(rows)
}

/// Accuracy trend of the plane-wave benchmark across refinements.
pub fn run_mie_compare(
    base: &ExperimentConfig,
    refinements: &[u32],
) -> Result<Vec<TableRow>, CliError> {
    let mut rows = Vec::new();
    for &n_lambda in refinements {
        let config = ExperimentConfig {
            elements_per_wavelength: n_lambda,
            ..base.clone()
        };
        let t0 = Instant::now();
        let solve = run_planewave(&config)?;
        rows.push(TableRow {
            elements_per_wavelength: n_lambda,
            beta: config.beta,
            displacement: config.displacement(),
            n: solve.n,
            condition_number: f64::NAN,
            relative_error: solve.relative_error.unwrap_or(f64::NAN),
            relative_error_sqrt: solve.relative_error_sqrt.unwrap_or(f64::NAN),
            gmres_iterations: solve.gmres_iterations,
            seconds: t0.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

/// Field samples on a uniform grid for plotting, skipping interior points.
pub fn field_grid(
    op: &VirtualSourceOperator,
    density: &[Complex64],
    bounds: (Point2, Point2),
    resolution: (usize, usize),
) -> Result<Vec<(Point2, Complex64)>, CliError> {
    let (lo, hi) = bounds;
    let (nx, ny) = resolution;
    let mut samples = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let p = Point2::new(
                lo.x + (hi.x - lo.x) * ix as f64 / (nx.max(2) - 1) as f64,
                lo.y + (hi.y - lo.y) * iy as f64 / (ny.max(2) - 1) as f64,
            );
            if op.mesh().contains(p) {
                continue;
            }
            let u = op.evaluate_field(density, &[p])?[0];
            samples.push((p, u));
        }
    }
    Ok(samples)
}

// --- output formatting -------------------------------------------------

/// CSV rows for a spectrum: `index,re,im,abs`.
pub fn spectrum_csv(report: &SolveReport) -> String {
    let mut out = String::from("index,re,im,abs\n");
    for (i, (re, im)) in report
        .eigenvalues_re
        .iter()
        .zip(&report.eigenvalues_im)
        .enumerate()
    {
        let mag = (re * re + im * im).sqrt();
        let _ = writeln!(out, "{i},{re},{im},{mag}");
    }
    out
}

/// CSV rows for the probe comparison: `x,y,re_num,im_num,re_exact,im_exact`.
pub fn probes_csv(report: &SolveReport) -> String {
    let mut out = String::from("x,y,re_num,im_num,re_exact,im_exact\n");
    for (p, numeric, exact) in &report.probes {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            p.x, p.y, numeric.re, numeric.im, exact.re, exact.im
        );
    }
    out
}

/// CSV rows for the GMRES history: `iteration,relative_residual`.
pub fn residuals_csv(report: &SolveReport) -> String {
    let mut out = String::from("iteration,relative_residual\n");
    for (i, r) in report.gmres_residuals.iter().enumerate() {
        let _ = writeln!(out, "{i},{r}");
    }
    out
}

/// CSV rows for refinement tables.
pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out =
        String::from("n_lambda,beta,h,n,cond,rel_error,rel_error_sqrt,gmres_iterations,seconds\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.elements_per_wavelength,
            r.beta,
            r.displacement,
            r.n,
            r.condition_number,
            r.relative_error,
            r.relative_error_sqrt,
            r.gmres_iterations,
            r.seconds
        );
    }
    out
}

/// CSV rows for a field grid: `x,y,re_u,im_u,abs_u`.
pub fn field_csv(samples: &[(Point2, Complex64)]) -> String {
    let mut out = String::from("x,y,re_u,im_u,abs_u\n");
    for (p, u) in samples {
        let _ = writeln!(out, "{},{},{},{},{}", p.x, p.y, u.re, u.im, u.norm());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn relative_error_basics() {
        let exact = vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)];
        assert_eq!(relative_error(&exact, &exact).unwrap(), 0.0);
        let zero = vec![c(0.0, 0.0); 3];
        assert_eq!(relative_error(&zero, &exact).unwrap(), 1.0);
        // Uniform 10% amplitude error gives 0.01 in the ratio form.
        let scaled: Vec<Complex64> = exact.iter().map(|&z| z * 1.1).collect();
        let err = relative_error(&scaled, &exact).unwrap();
        assert!((err - 0.01).abs() < 1e-14);
    }

    #[test]
    fn relative_error_error_paths() {
        let a = vec![c(1.0, 0.0)];
        let b = vec![c(1.0, 0.0), c(2.0, 0.0)];
        assert!(matches!(
            relative_error(&a, &b),
            Err(CliError::LengthMismatch)
        ));
        let zero = vec![c(0.0, 0.0)];
        assert!(matches!(
            relative_error(&a, &zero),
            Err(CliError::ZeroDenominator)
        ));
    }

    #[test]
    fn displacement_convention_fixes_base_row() {
        // Every β must give h = λ/12 at N_λ = 12 when h_scale is automatic.
        for beta in [0.0, 0.5, 1.0] {
            let config = ExperimentConfig {
                beta,
                elements_per_wavelength: 12,
                ..ExperimentConfig::default()
            };
            let lambda = config.wavelength();
            assert!(
                (config.displacement() - lambda / 12.0).abs() < 1e-15,
                "beta = {beta}"
            );
        }
        // And scale with N_λ^{-β} beyond it.
        let config = ExperimentConfig {
            beta: 0.5,
            elements_per_wavelength: 48,
            ..ExperimentConfig::default()
        };
        let lambda = config.wavelength();
        let expected = lambda / 12.0 * (12.0_f64 / 48.0).sqrt();
        assert!((config.displacement() - expected).abs() < 1e-15);
    }

    #[test]
    fn geometry_choice_parsing() {
        assert!(matches!(
            GeometryChoice::parse("flower").unwrap(),
            GeometryChoice::Flower
        ));
        match GeometryChoice::parse("circle:2.5").unwrap() {
            GeometryChoice::Circle { radius } => assert_eq!(radius, 2.5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(GeometryChoice::parse("circle:-1").is_err());
        assert!(GeometryChoice::parse("pentagon").is_err());
    }

    #[test]
    fn config_validation() {
        let mut config = ExperimentConfig::default();
        assert!(config.validate().is_ok());
        config.beta = 1.5;
        assert!(config.validate().is_err());
        config.beta = 0.5;
        config.elements_per_wavelength = 1;
        assert!(config.validate().is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut report = SolveReport::empty(3, 0.05);
        report.eigenvalues_re = vec![1.0 / 3.0, -0.123_456_789_123_456_78, 2e-17];
        report.eigenvalues_im = vec![0.1 + 0.2, 7.25, -1.0];
        let csv = spectrum_csv(&report);
        for (line, (re, im)) in csv
            .lines()
            .skip(1)
            .zip(report.eigenvalues_re.iter().zip(&report.eigenvalues_im))
        {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields[1].parse::<f64>().unwrap(), *re);
            assert_eq!(fields[2].parse::<f64>().unwrap(), *im);
        }
    }

    #[test]
    fn coarse_manufactured_run_succeeds() {
        // Small smoke test at low wavenumber to keep unit tests fast; the
        // acceptance suite exercises the production configurations. The
        // flower waist half-width is 0.1, so h = λ/24 keeps the shifted
        // sources clear of each other at k = 2π.
        let config = ExperimentConfig {
            wavenumber: 2.0 * std::f64::consts::PI,
            elements_per_wavelength: 12,
            h_scale: Some(0.5),
            ..ExperimentConfig::default()
        };
        let report = run_manufactured(&config).unwrap();
        assert!(report.gmres_converged);
        let err = report.relative_error.unwrap();
        assert!(err < 0.05, "coarse-run relative error {err}");
    }

    #[test]
    fn displacement_beyond_waist_is_rejected() {
        // h = λ/8 = 0.125 at k = 2π exceeds the flower waist half-width,
        // so the shifted source polyline crosses itself.
        let config = ExperimentConfig {
            wavenumber: 2.0 * std::f64::consts::PI,
            elements_per_wavelength: 8,
            ..ExperimentConfig::default()
        };
        assert!(matches!(
            run_manufactured(&config),
            Err(CliError::Geometry(
                GeometryError::InvalidDisplacement { .. }
            ))
        ));
    }

    #[test]
    fn planewave_requires_circle() {
        let config = ExperimentConfig::default();
        assert!(matches!(
            run_planewave(&config),
            Err(CliError::InvalidConfig(_))
        ));
    }
}

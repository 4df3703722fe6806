//! Parametric closed boundary curves, their differential geometry, and the
//! quadrature meshes carrying the displaced virtual-source points.
//!
//! Curves are finite trigonometric series in the parameter `t ∈ [0, 2π)`,
//! which makes them closed and C^∞ by construction and keeps derivatives
//! exact. Meshes place nodes at uniform parameter steps with arclength
//! Jacobian weights — the periodic trapezoid rule, spectrally accurate for
//! smooth periodic integrands.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("curve tangent is degenerate at t = {t} (|c'(t)| = {speed:e})")]
    DegenerateTangent { t: f64, speed: f64 },
    #[error("curve must be parameterized counterclockwise")]
    NotCounterclockwise,
    #[error("wavenumber must be positive, got {0}")]
    InvalidWavenumber(f64),
    #[error("elements per wavelength must be at least 2, got {0}")]
    InvalidResolution(u32),
    #[error("mesh needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("displacement h = {h} is invalid: {reason}")]
    InvalidDisplacement { h: f64, reason: String },
    #[error("parallel-curve element factor 1 - h*kappa = {factor} is not positive")]
    FoldOver { factor: f64 },
    #[error("failed to parse curve description: {0}")]
    Parse(String),
}

/// A point (or vector) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Rotation by −π/2: maps a CCW unit tangent to the outward normal.
    pub fn rotated_cw(self) -> Self {
        Self::new(self.y, -self.x)
    }
}

impl std::ops::Add for Point2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl std::ops::Neg for Point2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// One coordinate of a curve as a finite trigonometric series
/// `c + Σ_j (a_j cos(jt) + b_j sin(jt))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries {
    constant: f64,
    /// `(a_j, b_j)` for harmonic `j = 1, 2, ...`
    harmonics: Vec<(f64, f64)>,
}

impl TrigSeries {
    pub fn new(constant: f64, harmonics: Vec<(f64, f64)>) -> Self {
        Self {
            constant,
            harmonics,
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let mut v = self.constant;
        for (j, &(a, b)) in self.harmonics.iter().enumerate() {
            let jt = (j + 1) as f64 * t;
            v += a * jt.cos() + b * jt.sin();
        }
        v
    }

    fn deriv(&self, t: f64) -> f64 {
        let mut v = 0.0;
        for (j, &(a, b)) in self.harmonics.iter().enumerate() {
            let jf = (j + 1) as f64;
            let jt = jf * t;
            v += jf * (-a * jt.sin() + b * jt.cos());
        }
        v
    }

    fn second_deriv(&self, t: f64) -> f64 {
        let mut v = 0.0;
        for (j, &(a, b)) in self.harmonics.iter().enumerate() {
            let jf = (j + 1) as f64;
            let jt = jf * t;
            v -= jf * jf * (a * jt.cos() + b * jt.sin());
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveKind {
    /// The non-canonical smooth test shape
    /// `x(t) = (1 + 0.2 cos 2t) cos t`, `y(t) = (1 + 0.9 cos 2t) sin t`.
    Flower,
    Circle {
        radius: f64,
    },
    Custom,
}

/// A smooth closed curve with exact derivatives and a CCW parameterization.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    kind: CurveKind,
    x: TrigSeries,
    y: TrigSeries,
    length: f64,
    max_curvature: f64,
}

/// Point data returned by [`BoundaryCurve::frame`].
#[derive(Debug, Clone, Copy)]
pub struct CurveFrame {
    pub point: Point2,
    pub unit_tangent: Point2,
    /// Outward unit normal (tangent rotated by −π/2).
    pub outward_normal: Point2,
    /// Signed curvature, positive where the curve bends away from the
    /// outward normal (e.g. +1/R on a CCW circle).
    pub curvature: f64,
}

impl BoundaryCurve {
    /// The flower-like test shape. In harmonic form:
    /// `x = 1.1 cos t + 0.1 cos 3t`, `y = 0.55 sin t + 0.45 sin 3t`.
    pub fn flower() -> Self {
        let x = TrigSeries::new(0.0, vec![(1.1, 0.0), (0.0, 0.0), (0.1, 0.0)]);
        let y = TrigSeries::new(0.0, vec![(0.0, 0.55), (0.0, 0.0), (0.0, 0.45)]);
        Self::build(CurveKind::Flower, x, y).expect("flower curve is regular")
    }

    pub fn circle(radius: f64) -> Self {
        assert!(radius > 0.0, "circle radius must be positive");
        let x = TrigSeries::new(0.0, vec![(radius, 0.0)]);
        let y = TrigSeries::new(0.0, vec![(0.0, radius)]);
        Self::build(CurveKind::Circle { radius }, x, y).expect("circle is regular")
    }

    /// A user-supplied curve from two trigonometric series.
    pub fn from_series(x: TrigSeries, y: TrigSeries) -> Result<Self, GeometryError> {
        Self::build(CurveKind::Custom, x, y)
    }

    /// Parses the coefficient text format: two lines
    /// `x: a0 a1 b1 a2 b2 ...` and `y: c0 c1 d1 ...`, with `#` comments.
    /// Coefficients are interleaved cosine/sine amplitudes per harmonic;
    /// missing trailing entries are zero.
    pub fn from_coefficient_text(text: &str) -> Result<Self, GeometryError> {
        let mut x = None;
        let mut y = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (label, rest) = line
                .split_once(':')
                .ok_or_else(|| GeometryError::Parse(format!("expected `x:`/`y:` line: {line}")))?;
            let coeffs: Vec<f64> = rest
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|e| GeometryError::Parse(format!("bad number `{tok}`: {e}")))
                })
                .collect::<Result<_, _>>()?;
            let series = series_from_flat(&coeffs);
            match label.trim() {
                "x" => x = Some(series),
                "y" => y = Some(series),
                other => {
                    return Err(GeometryError::Parse(format!(
                        "unknown coordinate label `{other}`"
                    )))
                }
            }
        }
        match (x, y) {
            (Some(x), Some(y)) => Self::from_series(x, y),
            _ => Err(GeometryError::Parse(
                "both an `x:` and a `y:` line are required".into(),
            )),
        }
    }

    fn build(kind: CurveKind, x: TrigSeries, y: TrigSeries) -> Result<Self, GeometryError> {
        let mut curve = Self {
            kind,
            x,
            y,
            length: 0.0,
            max_curvature: 0.0,
        };
        curve.validate()?;
        curve.length = curve.compute_length();
        curve.max_curvature = curve.compute_max_curvature();
        Ok(curve)
    }

    fn validate(&self) -> Result<(), GeometryError> {
        const SAMPLES: usize = 2048;
        let mut area2 = 0.0;
        for i in 0..SAMPLES {
            let t = 2.0 * std::f64::consts::PI * i as f64 / SAMPLES as f64;
            let speed = self.velocity(t).norm();
            if speed < 1e-12 {
                return Err(GeometryError::DegenerateTangent { t, speed });
            }
            // Signed area via Green's theorem: (1/2)∮(x y' − y x') dt.
            let p = self.position(t);
            let v = self.velocity(t);
            area2 += p.x * v.y - p.y * v.x;
        }
        if area2 <= 0.0 {
            return Err(GeometryError::NotCounterclockwise);
        }
        Ok(())
    }

    fn compute_length(&self) -> f64 {
        // Periodic trapezoid with doubling until converged.
        let mut n = 1024;
        let mut prev = self.length_with(n);
        loop {
            n *= 2;
            let next = self.length_with(n);
            if (next - prev).abs() <= 1e-13 * next.abs() || n >= 1 << 20 {
                return next;
            }
            prev = next;
        }
    }

    fn length_with(&self, n: usize) -> f64 {
        let dt = 2.0 * std::f64::consts::PI / n as f64;
        (0..n)
            .map(|i| self.velocity(i as f64 * dt).norm())
            .sum::<f64>()
            * dt
    }

    fn compute_max_curvature(&self) -> f64 {
        const SAMPLES: usize = 4096;
        (0..SAMPLES)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / SAMPLES as f64;
                self.frame(t).map_or(0.0, |f| f.curvature.abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    /// Radius if this curve is an exact circle.
    pub fn circle_radius(&self) -> Option<f64> {
        match self.kind {
            CurveKind::Circle { radius } => Some(radius),
            _ => None,
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn max_curvature(&self) -> f64 {
        self.max_curvature
    }

    pub fn position(&self, t: f64) -> Point2 {
        Point2::new(self.x.eval(t), self.y.eval(t))
    }

    pub fn velocity(&self, t: f64) -> Point2 {
        Point2::new(self.x.deriv(t), self.y.deriv(t))
    }

    pub fn acceleration(&self, t: f64) -> Point2 {
        Point2::new(self.x.second_deriv(t), self.y.second_deriv(t))
    }

    /// Position, unit tangent, outward normal and signed curvature at `t`.
    pub fn frame(&self, t: f64) -> Result<CurveFrame, GeometryError> {
        let v = self.velocity(t);
        let speed = v.norm();
        if speed < 1e-12 {
            return Err(GeometryError::DegenerateTangent { t, speed });
        }
        let a = self.acceleration(t);
        let unit_tangent = v * (1.0 / speed);
        let outward_normal = unit_tangent.rotated_cw();
        let curvature = (v.x * a.y - v.y * a.x) / (speed * speed * speed);
        Ok(CurveFrame {
            point: self.position(t),
            unit_tangent,
            outward_normal,
            curvature,
        })
    }
}

fn series_from_flat(coeffs: &[f64]) -> TrigSeries {
    let constant = coeffs.first().copied().unwrap_or(0.0);
    let mut harmonics = Vec::new();
    let mut rest = coeffs.get(1..).unwrap_or(&[]).iter().copied();
    loop {
        match (rest.next(), rest.next()) {
            (Some(a), Some(b)) => harmonics.push((a, b)),
            (Some(a), None) => {
                harmonics.push((a, 0.0));
                break;
            }
            _ => break,
        }
    }
    TrigSeries::new(constant, harmonics)
}

/// Displacement rule `h = c·λ/N_λ^β`.
pub fn displacement(lambda: f64, elements_per_wavelength: u32, beta: f64, scale: f64) -> f64 {
    scale * lambda / (elements_per_wavelength as f64).powf(beta)
}

/// Arclength-element ratio `dS_h/dS = 1 − h·κ` of the inward parallel curve.
pub fn surface_element_factor(curvature: f64, h: f64) -> Result<f64, GeometryError> {
    let factor = 1.0 - h * curvature;
    if factor <= 0.0 {
        return Err(GeometryError::FoldOver { factor });
    }
    Ok(factor)
}

/// Quadrature/collocation data on `Γ` plus the shifted sources on `Γ_h`.
#[derive(Debug, Clone)]
pub struct Mesh {
    curve: BoundaryCurve,
    wavenumber: f64,
    elements_per_wavelength: u32,
    displacement: f64,
    params: Vec<f64>,
    nodes: Vec<Point2>,
    weights: Vec<f64>,
    normals: Vec<Point2>,
    curvatures: Vec<f64>,
    sources: Vec<Point2>,
    element_factors: Vec<f64>,
    /// Dense polygonal sampling of the curve used for containment tests.
    polygon: Vec<Point2>,
}

impl Mesh {
    /// Builds the mesh with `N = ceil(N_λ·2π/λ)` nodes, `λ = 2π/k`.
    ///
    /// Elements are counted along the 2π parameter interval. For the
    /// near-uniform parameterizations this solver targets, that coincides
    /// with counting arclength elements up to the uniformity ratio, and it
    /// reproduces the reference resolutions exactly (unit circle at
    /// `k = 4π, N_λ = 12` gives `N = 151`, the flower curve `N = 151`).
    pub fn build(
        curve: &BoundaryCurve,
        wavenumber: f64,
        elements_per_wavelength: u32,
        displacement: f64,
    ) -> Result<Self, GeometryError> {
        if wavenumber <= 0.0 || wavenumber.is_nan() {
            return Err(GeometryError::InvalidWavenumber(wavenumber));
        }
        if elements_per_wavelength < 2 {
            return Err(GeometryError::InvalidResolution(elements_per_wavelength));
        }
        let lambda = 2.0 * std::f64::consts::PI / wavenumber;
        let n =
            (elements_per_wavelength as f64 * 2.0 * std::f64::consts::PI / lambda).ceil() as usize;
        Self::assemble(curve, wavenumber, elements_per_wavelength, n, displacement)
    }

    /// Builds a mesh with an explicit node count (used by resolution studies).
    pub fn with_node_count(
        curve: &BoundaryCurve,
        wavenumber: f64,
        n: usize,
        displacement: f64,
    ) -> Result<Self, GeometryError> {
        if wavenumber <= 0.0 || wavenumber.is_nan() {
            return Err(GeometryError::InvalidWavenumber(wavenumber));
        }
        let lambda = 2.0 * std::f64::consts::PI / wavenumber;
        let n_lambda = (n as f64 * lambda / (2.0 * std::f64::consts::PI))
            .round()
            .max(2.0) as u32;
        Self::assemble(curve, wavenumber, n_lambda, n, displacement)
    }

    fn assemble(
        curve: &BoundaryCurve,
        wavenumber: f64,
        elements_per_wavelength: u32,
        n: usize,
        displacement: f64,
    ) -> Result<Self, GeometryError> {
        if n < 3 {
            return Err(GeometryError::TooFewNodes(n));
        }
        if displacement < 0.0 {
            return Err(GeometryError::InvalidDisplacement {
                h: displacement,
                reason: "h must be nonnegative".into(),
            });
        }
        let max_kappa = curve.max_curvature();
        if displacement > 0.0 && displacement * max_kappa >= 1.0 {
            return Err(GeometryError::InvalidDisplacement {
                h: displacement,
                reason: format!("h must stay below 1/max|kappa| = {:.6}", 1.0 / max_kappa),
            });
        }

        let dt = 2.0 * std::f64::consts::PI / n as f64;
        let mut params = Vec::with_capacity(n);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut normals = Vec::with_capacity(n);
        let mut curvatures = Vec::with_capacity(n);
        let mut sources = Vec::with_capacity(n);
        let mut element_factors = Vec::with_capacity(n);

        for i in 0..n {
            let t = i as f64 * dt;
            let frame = curve.frame(t)?;
            params.push(t);
            nodes.push(frame.point);
            weights.push(curve.velocity(t).norm() * dt);
            normals.push(frame.outward_normal);
            curvatures.push(frame.curvature);
            sources.push(frame.point - frame.outward_normal * displacement);
            element_factors.push(surface_element_factor(frame.curvature, displacement)?);
        }

        let polygon_len = (4 * n).max(1024);
        let polygon = (0..polygon_len)
            .map(|i| curve.position(2.0 * std::f64::consts::PI * i as f64 / polygon_len as f64))
            .collect::<Vec<_>>();

        let mesh = Self {
            curve: curve.clone(),
            wavenumber,
            elements_per_wavelength,
            displacement,
            params,
            nodes,
            weights,
            normals,
            curvatures,
            sources,
            element_factors,
            polygon,
        };

        if displacement > 0.0 {
            for (i, z) in mesh.sources.iter().enumerate() {
                if !mesh.contains(*z) {
                    return Err(GeometryError::InvalidDisplacement {
                        h: displacement,
                        reason: format!("shifted source {i} leaves the interior"),
                    });
                }
            }
            if polyline_self_intersects(&mesh.sources) {
                return Err(GeometryError::InvalidDisplacement {
                    h: displacement,
                    reason: "shifted source polyline self-intersects".into(),
                });
            }
        }

        Ok(mesh)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavenumber
    }

    pub fn elements_per_wavelength(&self) -> u32 {
        self.elements_per_wavelength
    }

    pub fn displacement(&self) -> f64 {
        self.displacement
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn nodes(&self) -> &[Point2] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn normals(&self) -> &[Point2] {
        &self.normals
    }

    pub fn curvatures(&self) -> &[f64] {
        &self.curvatures
    }

    /// Shifted source points `z_n = y_n − h·ν(y_n)`.
    pub fn sources(&self) -> &[Point2] {
        &self.sources
    }

    /// Per-node parallel-curve factors `1 − h·κ(y_n)`.
    pub fn element_factors(&self) -> &[f64] {
        &self.element_factors
    }

    /// Ratio of the largest to smallest arclength element; values above ~5
    /// mean the parameterization is far from uniform.
    pub fn uniformity_ratio(&self) -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for &w in &self.weights {
            lo = lo.min(w);
            hi = hi.max(w);
        }
        hi / lo
    }

    /// Winding-number containment test against a dense curve sampling.
    pub fn contains(&self, p: Point2) -> bool {
        winding_number(&self.polygon, p) != 0
    }

    /// Nodes of the outward parallel curve at the given distance, matching
    /// the mesh nodes one-to-one.
    pub fn outward_probe_points(&self, distance: f64) -> Vec<Point2> {
        self.nodes
            .iter()
            .zip(&self.normals)
            .map(|(&y, &nu)| y + nu * distance)
            .collect()
    }
}

/// Winding number of a closed polygon around `p` (crossing counting).
fn winding_number(polygon: &[Point2], p: Point2) -> i32 {
    let mut winding = 0;
    for i in 0..polygon.len() {
        let a = polygon[i];
        let b = polygon[(i + 1) % polygon.len()];
        if a.y <= p.y {
            if b.y > p.y && cross(b - a, p - a) > 0.0 {
                winding += 1;
            }
        } else if b.y <= p.y && cross(b - a, p - a) < 0.0 {
            winding -= 1;
        }
    }
    winding
}

fn cross(u: Point2, v: Point2) -> f64 {
    u.x * v.y - u.y * v.x
}

/// True if any two non-adjacent segments of the closed polyline intersect.
fn polyline_self_intersects(points: &[Point2]) -> bool {
    let n = points.len();
    for i in 0..n {
        let a1 = points[i];
        let a2 = points[(i + 1) % n];
        for j in i + 2..n {
            // Skip the shared-endpoint neighbors, including the wrap pair.
            if i == 0 && j == n - 1 {
                continue;
            }
            let b1 = points[j];
            let b2 = points[(j + 1) % n];
            if segments_intersect(a1, a2, b1, b2) {
                return true;
            }
        }
    }
    false
}

fn segments_intersect(a1: Point2, a2: Point2, b1: Point2, b2: Point2) -> bool {
    let d1 = cross(a2 - a1, b1 - a1);
    let d2 = cross(a2 - a1, b2 - a1);
    let d3 = cross(b2 - b1, a1 - b1);
    let d4 = cross(b2 - b1, a2 - b1);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

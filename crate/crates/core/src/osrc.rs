//! On-surface radiation operator `Λ ≈ ik·sqrt(1 + Δ_Γ/k²)` realized through
//! a rotated Padé approximation of the square root and a periodic piecewise
//! linear FEM for the tangential Laplacian, plus the preconditioner
//! `B = I − h·Λ`.

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::Mesh;
use crate::linalg::{self, LinAlgError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OsrcError {
    #[error("Padé term count {0} outside the supported range 1..=16")]
    InvalidTermCount(usize),
    #[error("mesh element {index} has degenerate arclength {length:e}")]
    DegenerateElement { index: usize, length: f64 },
    #[error("resolvent solve failed: {0}")]
    Resolvent(#[from] LinAlgError),
    #[error("vector length {got} does not match the {expected}-node surface")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Partial-fraction coefficients of the `[M/M]` Padé approximant of
/// `sqrt(1+z)` about `z = 0`, in the form `a_0 + Σ a_m/(z − b_m)`,
/// optionally branch-rotated by an angle θ.
#[derive(Debug, Clone)]
pub struct PadeCoefficients {
    terms: usize,
    angle: f64,
    /// Unrotated real coefficients.
    base_a0: f64,
    base_num: Vec<f64>,
    base_poles: Vec<f64>,
    /// Rotated coefficients (equal to the base ones when θ = 0).
    a0: Complex64,
    num: Vec<Complex64>,
    poles: Vec<Complex64>,
}

impl PadeCoefficients {
    /// The unrotated (θ = 0) coefficients.
    ///
    /// Starting from the closed-form sum
    /// `sqrt(1+z) ≈ 1 + Σ_j A_j z/(1 + B_j z)` with
    /// `A_j = 2/(2M+1)·sin²(jπ/(2M+1))`, `B_j = cos²(jπ/(2M+1))`,
    /// the partial fractions give `a_0 = 1 + Σ A_j/B_j`,
    /// `a_m = −A_m/B_m²`, `b_m = −1/B_m`.
    pub fn base(terms: usize) -> Result<Self, OsrcError> {
        if !(1..=16).contains(&terms) {
            return Err(OsrcError::InvalidTermCount(terms));
        }
        let m = terms as f64;
        let mut a0 = 1.0;
        let mut num = Vec::with_capacity(terms);
        let mut poles = Vec::with_capacity(terms);
        for j in 1..=terms {
            let angle = j as f64 * std::f64::consts::PI / (2.0 * m + 1.0);
            let a_j = 2.0 / (2.0 * m + 1.0) * angle.sin().powi(2);
            let b_j = angle.cos().powi(2);
            a0 += a_j / b_j;
            num.push(-a_j / (b_j * b_j));
            poles.push(-1.0 / b_j);
        }
        Ok(Self {
            terms,
            angle: 0.0,
            a0: Complex64::new(a0, 0.0),
            num: num.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            poles: poles.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            base_a0: a0,
            base_num: num,
            base_poles: poles,
        })
    }

    /// Branch rotation by θ:
    /// `ã_0 = a_0·e^{iθ/2}`, `ã_m = a_m·e^{3iθ/2}`, `b̃_m = (1+b_m)e^{iθ} − 1`.
    pub fn rotated(terms: usize, angle: f64) -> Result<Self, OsrcError> {
        let base = Self::base(terms)?;
        if angle == 0.0 {
            return Ok(base);
        }
        let half = Complex64::from_polar(1.0, 0.5 * angle);
        let three_half = Complex64::from_polar(1.0, 1.5 * angle);
        let full = Complex64::from_polar(1.0, angle);
        Ok(Self {
            angle,
            a0: base.base_a0 * half,
            num: base.base_num.iter().map(|&a| a * three_half).collect(),
            poles: base
                .base_poles
                .iter()
                .map(|&b| (1.0 + b) * full - 1.0)
                .collect(),
            ..base
        })
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn leading(&self) -> Complex64 {
        self.a0
    }

    pub fn numerators(&self) -> &[Complex64] {
        &self.num
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    /// Evaluates the (possibly rotated) approximant at `z`.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let mut value = self.a0;
        for (a, b) in self.num.iter().zip(&self.poles) {
            value += a / (z - b);
        }
        value
    }
}

/// Periodic piecewise-linear mass and stiffness matrices on the
/// arclength-weighted node graph of the boundary.
#[derive(Debug, Clone)]
pub struct PeriodicFem {
    n: usize,
    element_lengths: Vec<f64>,
    mass_diag: Vec<f64>,
    mass_off: Vec<f64>,
    stiffness_diag: Vec<f64>,
    stiffness_off: Vec<f64>,
}

impl PeriodicFem {
    /// Assembles the P1 matrices with element lengths given by the
    /// arclength between consecutive mesh nodes (wrap-around included).
    pub fn from_mesh(mesh: &Mesh) -> Result<Self, OsrcError> {
        let n = mesh.len();
        let params = mesh.params();
        let curve = mesh.curve();
        let two_pi = 2.0 * std::f64::consts::PI;

        // Element e spans [t_e, t_{e+1}]; 4-point Gauss per element.
        const GAUSS_X: [f64; 4] = [
            -0.861_136_311_594_052_6,
            -0.339_981_043_584_856_3,
            0.339_981_043_584_856_3,
            0.861_136_311_594_052_6,
        ];
        const GAUSS_W: [f64; 4] = [
            0.347_854_845_137_453_86,
            0.652_145_154_862_546_1,
            0.652_145_154_862_546_1,
            0.347_854_845_137_453_86,
        ];

        let mut element_lengths = Vec::with_capacity(n);
        for e in 0..n {
            let t0 = params[e];
            let t1 = if e + 1 < n { params[e + 1] } else { two_pi };
            let half = 0.5 * (t1 - t0);
            let mid = 0.5 * (t1 + t0);
            let len: f64 = GAUSS_X
                .iter()
                .zip(&GAUSS_W)
                .map(|(&x, &w)| w * curve.velocity(mid + half * x).norm())
                .sum::<f64>()
                * half;
            if len < 1e-12 {
                return Err(OsrcError::DegenerateElement {
                    index: e,
                    length: len,
                });
            }
            element_lengths.push(len);
        }

        let mut mass_diag = vec![0.0; n];
        let mut mass_off = vec![0.0; n];
        let mut stiffness_diag = vec![0.0; n];
        let mut stiffness_off = vec![0.0; n];
        for e in 0..n {
            let len = element_lengths[e];
            let next = (e + 1) % n;
            mass_diag[e] += len / 3.0;
            mass_diag[next] += len / 3.0;
            mass_off[e] += len / 6.0;
            stiffness_diag[e] += 1.0 / len;
            stiffness_diag[next] += 1.0 / len;
            stiffness_off[e] -= 1.0 / len;
        }

        Ok(Self {
            n,
            element_lengths,
            mass_diag,
            mass_off,
            stiffness_diag,
            stiffness_off,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn element_lengths(&self) -> &[f64] {
        &self.element_lengths
    }

    pub fn mass_diag(&self) -> &[f64] {
        &self.mass_diag
    }

    pub fn mass_off(&self) -> &[f64] {
        &self.mass_off
    }

    pub fn stiffness_diag(&self) -> &[f64] {
        &self.stiffness_diag
    }

    pub fn stiffness_off(&self) -> &[f64] {
        &self.stiffness_off
    }

    /// `M·v` for a complex vector.
    pub fn mass_mul(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.cyclic_mul(&self.mass_diag, &self.mass_off, v)
    }

    /// `K·v` for a complex vector.
    pub fn stiffness_mul(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.cyclic_mul(&self.stiffness_diag, &self.stiffness_off, v)
    }

    fn cyclic_mul(&self, diag: &[f64], off: &[f64], v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let prev = (i + n - 1) % n;
                let next = (i + 1) % n;
                diag[i] * v[i] + off[i] * v[next] + off[prev] * v[prev]
            })
            .collect()
    }
}

/// The assembled radiation operator `Λ` and preconditioner `B = I − hΛ`.
#[derive(Debug, Clone)]
pub struct OsrcOperator {
    fem: PeriodicFem,
    pade: PadeCoefficients,
    wavenumber: f64,
    /// Damping ε in `k_ε = k + iε·k^{1/3}`; zero by default.
    damping: f64,
}

impl OsrcOperator {
    pub fn new(fem: PeriodicFem, pade: PadeCoefficients, wavenumber: f64) -> Self {
        Self {
            fem,
            pade,
            wavenumber,
            damping: 0.0,
        }
    }

    pub fn with_damping(mut self, damping: f64) -> Self {
        self.damping = damping;
        self
    }

    pub fn fem(&self) -> &PeriodicFem {
        &self.fem
    }

    pub fn pade(&self) -> &PadeCoefficients {
        &self.pade
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    /// Applies `Λ v = ik·(ã_0 v + Σ_m ã_m w_m)`, where each `w_m` solves the
    /// resolvent system `(−K/k_ε² − b̃_m M)·w_m = M·v`.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>, OsrcError> {
        let n = self.fem.len();
        if v.len() != n {
            return Err(OsrcError::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        let k = self.wavenumber;
        let k_eps = Complex64::new(k, self.damping * k.cbrt());
        let inv_k2 = Complex64::new(1.0, 0.0) / (k_eps * k_eps);

        let rhs = self.fem.mass_mul(v);
        let mut acc: Vec<Complex64> = v.iter().map(|&vi| self.pade.leading() * vi).collect();

        let mut diag = vec![Complex64::new(0.0, 0.0); n];
        let mut off = vec![Complex64::new(0.0, 0.0); n - 1];
        for (&a_m, &b_m) in self.pade.numerators().iter().zip(self.pade.poles()) {
            for (slot, (&kd, &md)) in diag
                .iter_mut()
                .zip(self.fem.stiffness_diag.iter().zip(&self.fem.mass_diag))
            {
                *slot = -inv_k2 * kd - b_m * md;
            }
            for (slot, (&ko, &mo)) in off
                .iter_mut()
                .zip(self.fem.stiffness_off.iter().zip(&self.fem.mass_off))
            {
                *slot = -inv_k2 * ko - b_m * mo;
            }
            let corner = -inv_k2 * self.fem.stiffness_off[n - 1] - b_m * self.fem.mass_off[n - 1];
            let w = linalg::solve_cyclic_tridiagonal(&diag, &off, &off, (corner, corner), &rhs)?;
            for (slot, wi) in acc.iter_mut().zip(&w) {
                *slot += a_m * wi;
            }
        }

        let ik = Complex64::new(0.0, k);
        Ok(acc.into_iter().map(|x| ik * x).collect())
    }

    /// Applies the preconditioner `B v = v − h·Λ v`.
    pub fn apply_preconditioner(
        &self,
        displacement: f64,
        v: &[Complex64],
    ) -> Result<Vec<Complex64>, OsrcError> {
        let lambda_v = self.apply(v)?;
        Ok(v.iter()
            .zip(&lambda_v)
            .map(|(&vi, &li)| vi - displacement * li)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoundaryCurve, Mesh};

    const PI: f64 = std::f64::consts::PI;
    const K4PI: f64 = 4.0 * PI;

    #[test]
    fn one_term_coefficients_are_exact() {
        // 1 + (z/2)/(1 + z/4) = 3 − 8/(z + 4)
        let p = PadeCoefficients::base(1).unwrap();
        assert!((p.leading().re - 3.0).abs() < 1e-14);
        assert!((p.numerators()[0].re + 8.0).abs() < 1e-13);
        assert!((p.poles()[0].re + 4.0).abs() < 1e-13);
    }

    #[test]
    fn value_match_at_origin_for_all_orders() {
        for m in 1..=16 {
            let p = PadeCoefficients::base(m).unwrap();
            let v = p.evaluate(Complex64::new(0.0, 0.0));
            assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-15, "M = {m}");
        }
    }

    #[test]
    fn four_terms_approximate_sqrt_on_interval() {
        // The [4/4] approximant's true sup error on [−0.5, 1] is 3.644e-7,
        // attained at z = 1 (cross-checked against continued-fraction
        // convergents of sqrt(1+z)).
        let p = PadeCoefficients::base(4).unwrap();
        let mut worst = 0.0_f64;
        for i in 0..=1500 {
            let z = -0.5 + 1.5 * i as f64 / 1500.0;
            let err = (p.evaluate(Complex64::new(z, 0.0)).re - (1.0 + z).sqrt()).abs();
            worst = worst.max(err);
        }
        assert!(worst <= 4e-7, "max error {worst:e}");
    }

    #[test]
    fn order_condition_error_ratio() {
        // err(z) ~ C·z^{2M+1}, so halving z from 0.2 to 0.1 divides the
        // error by at least 2^{2M} (one factor of two as slack).
        for m in 1..=4 {
            let p = PadeCoefficients::base(m).unwrap();
            let err = |z: f64| (p.evaluate(Complex64::new(z, 0.0)).re - (1.0 + z).sqrt()).abs();
            let ratio = err(0.2) / err(0.1);
            assert!(ratio >= (1u64 << (2 * m)) as f64, "M = {m}: ratio {ratio}");
        }
    }

    #[test]
    fn rotation_identities_for_one_term() {
        // ã_0 = 3e^{iπ/4}, ã_1 = −8e^{3iπ/4}, b̃_1 = −1 − 3i.
        let p = PadeCoefficients::rotated(1, PI / 2.0).unwrap();
        let expect_a0 = 3.0 * Complex64::from_polar(1.0, PI / 4.0);
        let expect_a1 = -8.0 * Complex64::from_polar(1.0, 3.0 * PI / 4.0);
        let expect_b1 = Complex64::new(-1.0, -3.0);
        assert!((p.leading() - expect_a0).norm() < 1e-14);
        assert!((p.numerators()[0] - expect_a1).norm() < 1e-13);
        assert!((p.poles()[0] - expect_b1).norm() < 1e-13);
    }

    #[test]
    fn rotated_form_equals_substituted_base_form() {
        // e^{iθ/2}(a_0 + Σ a_m/((1+z)e^{−iθ} − 1 − b_m)) must equal the
        // partial-fraction form with rotated coefficients.
        let theta = PI / 2.0;
        let base = PadeCoefficients::base(4).unwrap();
        let rot = PadeCoefficients::rotated(4, theta).unwrap();
        let half = Complex64::from_polar(1.0, 0.5 * theta);
        let inv_full = Complex64::from_polar(1.0, -theta);
        for i in 0..40 {
            let z = Complex64::new(-10.0 + 0.5 * i as f64, 0.3);
            let mut direct = Complex64::new(base.base_a0, 0.0);
            for (a, b) in base.base_num.iter().zip(&base.base_poles) {
                direct += a / ((1.0 + z) * inv_full - 1.0 - b);
            }
            direct *= half;
            let via_rotated = rot.evaluate(z);
            assert!(
                (direct - via_rotated).norm() < 1e-14 * direct.norm().max(1.0),
                "z = {z}"
            );
        }
    }

    proptest::proptest! {
        // The two partial-fraction forms of the rotated approximant are the
        // same rational function for any angle and evaluation point.
        #[test]
        fn rotation_identity_holds_for_any_angle(
            theta in 0.05f64..3.1,
            re in -20.0f64..5.0,
            im in -2.0f64..2.0,
            terms in 1usize..=8,
        ) {
            let base = PadeCoefficients::base(terms).unwrap();
            let rot = PadeCoefficients::rotated(terms, theta).unwrap();
            let z = Complex64::new(re, im);
            let half = Complex64::from_polar(1.0, 0.5 * theta);
            let inv_full = Complex64::from_polar(1.0, -theta);
            let mut direct = Complex64::new(base.base_a0, 0.0);
            for (a, b) in base.base_num.iter().zip(&base.base_poles) {
                direct += a / ((1.0 + z) * inv_full - 1.0 - b);
            }
            direct *= half;
            let via_rotated = rot.evaluate(z);
            proptest::prop_assert!(
                (direct - via_rotated).norm() <= 1e-12 * direct.norm().max(1.0),
                "θ = {theta}, z = {z}: {direct} vs {via_rotated}"
            );
        }
    }

    #[test]
    fn rotated_poles_leave_real_axis() {
        let p = PadeCoefficients::rotated(4, PI / 2.0).unwrap();
        for b in p.poles() {
            assert!(b.im.abs() > 0.1, "pole {b} too close to the real axis");
        }
        // Bounded and continuous along the negative real axis.
        let mut worst = 0.0_f64;
        for i in 0..=2000 {
            let z = Complex64::new(-10.0 + 10.0 * i as f64 / 2000.0, 0.0);
            worst = worst.max(p.evaluate(z).norm());
        }
        assert!(worst < 10.0, "rotated approximant blew up: {worst}");
    }

    fn circle_fem(n: usize) -> (Mesh, PeriodicFem) {
        let curve = BoundaryCurve::circle(1.0);
        let mesh = Mesh::with_node_count(&curve, K4PI, n, 0.0).unwrap();
        let fem = PeriodicFem::from_mesh(&mesh).unwrap();
        (mesh, fem)
    }

    #[test]
    fn fem_matrices_on_uniform_circle() {
        let n = 64;
        let (_, fem) = circle_fem(n);
        let len = 2.0 * PI / n as f64;
        for e in 0..n {
            assert!((fem.element_lengths()[e] - len).abs() < 1e-12);
            assert!((fem.mass_diag()[e] - 2.0 * len / 3.0).abs() < 1e-12);
            assert!((fem.mass_off()[e] - len / 6.0).abs() < 1e-13);
            assert!((fem.stiffness_diag()[e] - 2.0 / len).abs() < 1e-9);
            assert!((fem.stiffness_off()[e] + 1.0 / len).abs() < 1e-9);
        }
    }

    #[test]
    fn stiffness_annihilates_constants_and_mass_sums_to_length() {
        let curve = BoundaryCurve::flower();
        let mesh = Mesh::build(&curve, K4PI, 12, 0.0).unwrap();
        let fem = PeriodicFem::from_mesh(&mesh).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); fem.len()];
        let k1 = fem.stiffness_mul(&ones);
        for v in &k1 {
            assert!(v.norm() < 1e-12);
        }
        let m1 = fem.mass_mul(&ones);
        let total: f64 = m1.iter().map(|z| z.re).sum();
        assert!(
            (total - curve.length()).abs() < 1e-10 * curve.length(),
            "1ᵀM1 = {total} vs |Γ| = {}",
            curve.length()
        );
        // Row sums of M equal the average of the two adjacent elements.
        for (i, row_sum) in m1.iter().enumerate() {
            let prev = (i + fem.len() - 1) % fem.len();
            let expected = 0.5 * (fem.element_lengths()[prev] + fem.element_lengths()[i]);
            assert!((row_sum.re - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_matrix_is_positive_definite_probe() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let (_, fem) = circle_fem(40);
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..10 {
            let v: Vec<Complex64> = (0..fem.len())
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let mv = fem.mass_mul(&v);
            let quad: f64 = v.iter().zip(&mv).map(|(a, b)| (a.conj() * b).re).sum();
            assert!(quad > 0.0);
        }
    }

    fn osrc_on_circle(n: usize, terms: usize) -> OsrcOperator {
        let (_, fem) = circle_fem(n);
        let pade = PadeCoefficients::rotated(terms, PI / 2.0).unwrap();
        OsrcOperator::new(fem, pade, K4PI)
    }

    #[test]
    fn constant_mode_reproduces_padé_value_at_zero() {
        let op = osrc_on_circle(128, 4);
        let v = vec![Complex64::new(1.0, 0.0); 128];
        let out = op.apply(&v).unwrap();
        let expected = Complex64::new(0.0, K4PI) * op.pade().evaluate(Complex64::new(0.0, 0.0));
        for o in &out {
            assert!(
                (o - expected).norm() < 1e-10 * expected.norm(),
                "constant mode: {o} vs {expected}"
            );
        }
    }

    #[test]
    fn fourier_modes_follow_the_symbol() {
        // On the unit circle, mode e^{int} maps to ≈ ik·P(−n²/k²)·e^{int}.
        let n_nodes = 512;
        let op = osrc_on_circle(n_nodes, 4);
        let k = K4PI;
        for mode in [1usize, 4, 9, 20] {
            let v: Vec<Complex64> = (0..n_nodes)
                .map(|j| {
                    Complex64::from_polar(1.0, mode as f64 * 2.0 * PI * j as f64 / n_nodes as f64)
                })
                .collect();
            let out = op.apply(&v).unwrap();
            // Rayleigh quotient against the (orthogonal) mode.
            let denom: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let coeff: Complex64 = v
                .iter()
                .zip(&out)
                .map(|(vi, oi)| vi.conj() * oi)
                .sum::<Complex64>()
                / denom;
            let z = Complex64::new(-((mode * mode) as f64) / (k * k), 0.0);
            let symbol = Complex64::new(0.0, k) * op.pade().evaluate(z);
            let rel = (coeff - symbol).norm() / symbol.norm();
            assert!(rel < 0.02, "mode {mode}: {coeff} vs {symbol} (rel {rel})");
        }
    }

    #[test]
    fn symbol_error_decays_quadratically_with_refinement() {
        let k = K4PI;
        let mode = 12usize;
        let mut errors = Vec::new();
        for n_nodes in [256usize, 512, 1024] {
            let op = osrc_on_circle(n_nodes, 4);
            let v: Vec<Complex64> = (0..n_nodes)
                .map(|j| {
                    Complex64::from_polar(1.0, mode as f64 * 2.0 * PI * j as f64 / n_nodes as f64)
                })
                .collect();
            let out = op.apply(&v).unwrap();
            let denom: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let coeff: Complex64 = v
                .iter()
                .zip(&out)
                .map(|(vi, oi)| vi.conj() * oi)
                .sum::<Complex64>()
                / denom;
            let z = Complex64::new(-((mode * mode) as f64) / (k * k), 0.0);
            let symbol = Complex64::new(0.0, k) * op.pade().evaluate(z);
            errors.push((coeff - symbol).norm() / symbol.norm());
        }
        assert!(
            errors[1] < 0.35 * errors[0] && errors[2] < 0.35 * errors[1],
            "errors not O(N^-2): {errors:?}"
        );
    }

    #[test]
    fn operator_is_linear() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let op = osrc_on_circle(96, 4);
        let mut rng = StdRng::seed_from_u64(3);
        let rand_vec = |rng: &mut StdRng| -> Vec<Complex64> {
            (0..96)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect()
        };
        let u = rand_vec(&mut rng);
        let v = rand_vec(&mut rng);
        let alpha = Complex64::new(0.3, -1.2);
        let beta = Complex64::new(-0.7, 0.4);
        let combined: Vec<Complex64> = u
            .iter()
            .zip(&v)
            .map(|(ui, vi)| alpha * ui + beta * vi)
            .collect();
        let lhs = op.apply(&combined).unwrap();
        let lu = op.apply(&u).unwrap();
        let lv = op.apply(&v).unwrap();
        let scale: f64 = lhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..96 {
            let rhs = alpha * lu[i] + beta * lv[i];
            assert!((lhs[i] - rhs).norm() < 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn preconditioner_limits() {
        let op = osrc_on_circle(64, 4);
        let v: Vec<Complex64> = (0..64)
            .map(|j| Complex64::new((j as f64).cos(), (j as f64 * 0.7).sin()))
            .collect();
        // h = 0 is the identity.
        let out = op.apply_preconditioner(0.0, &v).unwrap();
        for (a, b) in out.iter().zip(&v) {
            assert!((a - b).norm() < 1e-15);
        }
        // Constant mode: B·1 = (1 − ikh·P(0))·1 to solver accuracy.
        let h = 0.05;
        let ones = vec![Complex64::new(1.0, 0.0); 64];
        let out = op.apply_preconditioner(h, &ones).unwrap();
        let expected = Complex64::new(1.0, 0.0)
            - h * Complex64::new(0.0, K4PI) * op.pade().evaluate(Complex64::new(0.0, 0.0));
        for o in &out {
            assert!((o - expected).norm() < 1e-10 * expected.norm());
        }
    }
}

//! Bessel functions `J_n`, `Y_n` and Hankel functions `H_n^(1)` of
//! nonnegative integer order for positive real arguments.
//!
//! Only integer orders are needed (2D Fourier modes), which keeps the
//! implementation self-contained:
//!
//! - for `x < 4` the ascending series of `J_0, J_1, Y_0, Y_1` are summed
//!   directly (cancellation there costs at most a couple of digits);
//! - for `x ≥ 4` the pair `H_0, H_1` is evaluated through the exact
//!   Hankel-loop integral
//!   `H_ν(x) = sqrt(2/(πx)) e^{i(x − νπ/2 − π/4)} / Γ(ν+1/2)
//!             ∫_0^∞ e^{−t} t^{ν−1/2} (1 + it/(2x))^{ν−1/2} dt`,
//!   which after `t = s²` becomes a Gaussian-weighted entire integrand that
//!   the trapezoid rule resolves to machine precision;
//! - higher orders follow from recurrences: upward for `Y_n` (dominant
//!   solution) and for `J_n` when `x > n`, Miller's normalized backward
//!   recurrence for `J_n` when `x ≤ n`.

use num_complex::Complex64;
use thiserror::Error;

/// Largest supported order.
pub const MAX_ORDER: u32 = 200;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const FRAC_2_PI: f64 = std::f64::consts::FRAC_2_PI;
const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("bessel functions require a positive finite argument, got {0}")]
    NonPositiveArgument(f64),
    #[error("order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge(u32),
    #[error("Y_{order}({x}) is outside the representable f64 range")]
    Overflow { order: u32, x: f64 },
}

/// `J_n(x)` and `Y_n(x)` for integer order `n ≥ 0` and `x > 0`.
pub fn bessel_jy(order: u32, x: f64) -> Result<(f64, f64), SpecFunError> {
    check_args(order, x)?;
    let (j0, y0, j1, y1) = jy01(x);
    let n = order as usize;
    if n == 0 {
        return Ok((j0, y0));
    }
    if n == 1 {
        return Ok((j1, y1));
    }

    // Y_n grows with the order, so upward recurrence is stable; it is also
    // where overflow can occur for small x and large n.
    let mut ym = y0;
    let mut y = y1;
    for m in 1..n {
        let next = (2.0 * m as f64 / x) * y - ym;
        if !next.is_finite() {
            return Err(SpecFunError::Overflow { order, x });
        }
        ym = y;
        y = next;
    }

    let j = if x > n as f64 {
        // Oscillatory regime: upward recurrence does not amplify errors.
        let mut jm = j0;
        let mut j = j1;
        for m in 1..n {
            let next = (2.0 * m as f64 / x) * j - jm;
            jm = j;
            j = next;
        }
        j
    } else {
        bessel_j_backward(n, x)
    };

    Ok((j, y))
}

/// Hankel function of the first kind, `H_n^(1)(x) = J_n(x) + i·Y_n(x)`.
pub fn hankel1(order: u32, x: f64) -> Result<Complex64, SpecFunError> {
    let (j, y) = bessel_jy(order, x)?;
    Ok(Complex64::new(j, y))
}

/// Derivative of the Hankel function:
/// `H_n' = H_{n−1} − (n/x)·H_n`, with `H_{−1} = −H_1`.
pub fn hankel1_derivative(order: u32, x: f64) -> Result<Complex64, SpecFunError> {
    if order == 0 {
        return Ok(-hankel1(1, x)?);
    }
    let hm = hankel1(order - 1, x)?;
    let h = hankel1(order, x)?;
    Ok(hm - (order as f64 / x) * h)
}

/// `(H_0^(1)(x), H_1^(1)(x))` in one evaluation.
///
/// The displaced-kernel matrices need both orders at every source/target
/// pair, and the two share all the expensive parts of the evaluation.
pub fn hankel1_01(x: f64) -> Result<(Complex64, Complex64), SpecFunError> {
    check_args(0, x)?;
    let (j0, y0, j1, y1) = jy01(x);
    Ok((Complex64::new(j0, y0), Complex64::new(j1, y1)))
}

fn check_args(order: u32, x: f64) -> Result<(), SpecFunError> {
    if order > MAX_ORDER {
        return Err(SpecFunError::OrderTooLarge(order));
    }
    if x <= 0.0 || !x.is_finite() {
        return Err(SpecFunError::NonPositiveArgument(x));
    }
    Ok(())
}

/// `(J_0, Y_0, J_1, Y_1)` at `x > 0`.
fn jy01(x: f64) -> (f64, f64, f64, f64) {
    if x < SERIES_CUTOFF {
        jy01_series(x)
    } else {
        let (h0, h1) = hankel01_integral(x);
        (h0.re, h0.im, h1.re, h1.im)
    }
}

const SERIES_CUTOFF: f64 = 4.0;

/// Ascending series for the order-0/1 pairs. At `x < 4` the alternating
/// series loses at most ~2 digits to cancellation.
fn jy01_series(x: f64) -> (f64, f64, f64, f64) {
    let u = 0.25 * x * x;
    let log_term = (0.5 * x).ln() + EULER_GAMMA;

    // J_0 = Σ (−u)^k / (k!)²  and the companion sum with harmonic weights.
    let mut j0 = 1.0;
    let mut s0 = 0.0;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut k = 1.0_f64;
    loop {
        term *= -u / (k * k);
        harmonic += 1.0 / k;
        j0 += term;
        s0 -= term * harmonic; // Σ (−1)^{k+1} h_k u^k/(k!)²
        if term.abs() < 1e-19 * j0.abs().max(1.0) {
            break;
        }
        k += 1.0;
    }
    let y0 = FRAC_2_PI * (log_term * j0 + s0);

    // J_1 = (x/2) Σ (−u)^k / (k!(k+1)!) and Σ (−1)^k (h_k + h_{k+1}) u^k/(k!(k+1)!).
    let mut j1_sum = 1.0;
    let mut s1 = 1.0; // k = 0 contribution: h_0 + h_1 = 1
    term = 1.0;
    harmonic = 0.0;
    k = 1.0;
    loop {
        term *= -u / (k * (k + 1.0));
        harmonic += 1.0 / k;
        let h_pair = 2.0 * harmonic + 1.0 / (k + 1.0); // h_k + h_{k+1}
        j1_sum += term;
        s1 += term * h_pair;
        if term.abs() < 1e-19 * j1_sum.abs().max(1.0) {
            break;
        }
        k += 1.0;
    }
    let j1 = 0.5 * x * j1_sum;
    let y1 = FRAC_2_PI * (log_term * j1 - 1.0 / x) - (0.5 * x / PI) * s1;

    (j0, y0, j1, y1)
}

// Trapezoid discretization of ∫_0^∞ e^{−s²} φ(s) ds. The integrand is
// entire and even in s, so the rule converges faster than any power of the
// step; with this step/limit the error sits below 1e-16 for x ≥ 4.
const QUAD_STEP: f64 = 0.125;
const QUAD_NODES: usize = 73; // covers s ∈ [0, 9]

fn quad_tables() -> &'static ([f64; QUAD_NODES], [f64; QUAD_NODES]) {
    use std::sync::OnceLock;
    static TABLES: OnceLock<([f64; QUAD_NODES], [f64; QUAD_NODES])> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut s_sq = [0.0; QUAD_NODES];
        let mut weight = [0.0; QUAD_NODES];
        for (j, (s2, w)) in s_sq.iter_mut().zip(weight.iter_mut()).enumerate() {
            let s = j as f64 * QUAD_STEP;
            *s2 = s * s;
            *w = (-s * s).exp() * if j == 0 { 0.5 * QUAD_STEP } else { QUAD_STEP };
        }
        (s_sq, weight)
    })
}

/// `(H_0^(1)(x), H_1^(1)(x))` for `x ≥ 4` through the loop integral.
fn hankel01_integral(x: f64) -> (Complex64, Complex64) {
    let (s_sq, weight) = quad_tables();
    let half_inv_x = 0.5 / x;

    let mut i0 = Complex64::new(0.0, 0.0);
    let mut i1 = Complex64::new(0.0, 0.0);
    for (s2, w) in s_sq.iter().zip(weight.iter()) {
        // root = (1 + i s²/(2x))^{1/2}, principal branch.
        let root = Complex64::new(1.0, s2 * half_inv_x).sqrt();
        i0 += w / root;
        i1 += w * s2 * root;
    }

    let amp = (2.0 / (PI * x)).sqrt();
    let sqrt_pi = PI.sqrt();
    // Phases e^{i(x − π/4)} and e^{i(x − 3π/4)}.
    let phase0 = Complex64::from_polar(1.0, x - 0.25 * PI);
    let phase1 = Complex64::from_polar(1.0, x - 0.75 * PI);
    // Γ(1/2) = √π and Γ(3/2) = √π/2; the substitution t = s² contributes
    // a factor 2 to each integral.
    let h0 = amp * phase0 * (2.0 / sqrt_pi) * i0;
    let h1 = amp * phase1 * (4.0 / sqrt_pi) * i1;
    (h0, h1)
}

/// Miller's backward recurrence with even-sum normalization
/// (`J_0 + 2 Σ_{m≥1} J_{2m} = 1`), used in the decaying regime `x ≤ n`.
fn bessel_j_backward(n: usize, x: f64) -> f64 {
    let start = {
        // Enough headroom above n for the starting direction to relax onto
        // the minimal solution.
        let m = n + 52 + (x as usize) / 2;
        m + (m & 1) // even
    };

    let mut jp = 0.0_f64; // J~_{m+1}
    let mut j = 1e-300_f64; // J~_m
    let mut even_sum = 0.0_f64;
    let mut out = 0.0_f64;

    for m in (0..=start).rev() {
        let jm = (2.0 * (m + 1) as f64 / x) * j - jp;
        jp = j;
        j = jm;
        if m & 1 == 0 {
            even_sum += jm;
        }
        if m == n {
            out = jm;
        }
        if j.abs() > 1e250 {
            let scale = 1e-250;
            j *= scale;
            jp *= scale;
            even_sum *= scale;
            out *= scale;
        }
    }
    // even_sum now holds J~_0 + Σ_{m≥2, even} J~_m; the normalizer is
    // 2·even_sum − J~_0.
    let norm = 2.0 * even_sum - j;
    out / norm
}

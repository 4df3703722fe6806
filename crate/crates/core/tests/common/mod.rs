//! Arbitrary-precision Bessel oracle used by the acceptance suite.
//!
//! A minimal big-float (`BigInt` mantissa · 2^exp) carries the ascending
//! series of `J_n` and `Y_n` with enough working precision to absorb the
//! catastrophic cancellation at large arguments (the largest series term is
//! ~e^x, so the budget grows like 1.45·x bits). The oracle shares no code
//! with the library implementation, which evaluates through an integral
//! representation and recurrences instead.

use num_bigint::BigInt;

#[derive(Debug, Clone)]
pub struct Bf {
    mant: BigInt,
    exp: i64,
}

impl Bf {
    pub fn zero() -> Self {
        Self {
            mant: BigInt::from(0),
            exp: 0,
        }
    }

    pub fn from_u64(v: u64) -> Self {
        Self {
            mant: BigInt::from(v),
            exp: 0,
        }
    }

    /// Exact conversion of a finite f64.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp_field = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if exp_field == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_field - 1075)
        };
        Self {
            mant: BigInt::from(sign) * BigInt::from(mant),
            exp,
        }
    }

    /// Parses a decimal string (digits and one optional point) at the given
    /// binary precision.
    pub fn from_decimal(text: &str, prec: u32) -> Self {
        let negative = text.starts_with('-');
        let body = text.trim_start_matches('-');
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        let digits: String = format!("{int_part}{frac_part}");
        let value: BigInt = digits.parse().expect("decimal digits");
        let mut scale = BigInt::from(1u32);
        for _ in 0..frac_part.len() {
            scale *= 10;
        }
        let shift = prec as i64 + 64;
        let mant = (value << shift) / scale;
        let signed = if negative { -mant } else { mant };
        Self {
            mant: signed,
            exp: -shift,
        }
        .normalized(prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.sign() == num_bigint::Sign::NoSign
    }

    fn bits(&self) -> u64 {
        self.mant.magnitude().bits()
    }

    /// Magnitude in bits: value ≈ 2^mag2.
    pub fn mag2(&self) -> i64 {
        if self.is_zero() {
            i64::MIN / 2
        } else {
            self.exp + self.bits() as i64
        }
    }

    fn normalized(mut self, prec: u32) -> Self {
        let keep = prec as u64 + 32;
        let bits = self.bits();
        if bits > keep {
            let drop = (bits - keep) as i64;
            self.mant >>= drop;
            self.exp += drop;
        }
        self
    }

    pub fn neg(mut self) -> Self {
        self.mant = -self.mant;
        self
    }

    pub fn add(&self, other: &Self, prec: u32) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - exp) as u64;
        let b = &other.mant << (other.exp - exp) as u64;
        Self { mant: a + b, exp }.normalized(prec)
    }

    pub fn sub(&self, other: &Self, prec: u32) -> Self {
        self.add(&other.clone().neg(), prec)
    }

    pub fn mul(&self, other: &Self, prec: u32) -> Self {
        Self {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
        .normalized(prec)
    }

    pub fn mul_u64(&self, v: u64, prec: u32) -> Self {
        Self {
            mant: &self.mant * BigInt::from(v),
            exp: self.exp,
        }
        .normalized(prec)
    }

    pub fn div(&self, other: &Self, prec: u32) -> Self {
        assert!(!other.is_zero(), "big-float division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let target = prec as i64 + 64;
        let shift = (target + other.bits() as i64 - self.bits() as i64).max(0);
        let mant = (&self.mant << shift as u64) / &other.mant;
        Self {
            mant,
            exp: self.exp - shift - other.exp,
        }
        .normalized(prec)
    }

    pub fn div_u64(&self, v: u64, prec: u32) -> Self {
        self.div(&Self::from_u64(v), prec)
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits();
        let (top, shift) = if bits > 63 {
            let shift = (bits - 63) as i64;
            let top: BigInt = &self.mant >> shift;
            (top, shift)
        } else {
            (self.mant.clone(), 0)
        };
        let top_i64 = i64::try_from(top).expect("63-bit mantissa");
        let exponent = self.exp + shift;
        (top_i64 as f64) * 2.0_f64.powi(exponent as i32)
    }

    /// Natural logarithm via range reduction to [1, 2) and the atanh series.
    pub fn ln(&self, prec: u32) -> Self {
        assert!(self.mant.sign() == num_bigint::Sign::Plus, "ln needs x > 0");
        // m in [1, 2): m = mant·2^(exp + bits − 1) / 2^(bits − 1)
        let bits = self.bits() as i64;
        let pow2 = self.exp + bits - 1;
        let m = Self {
            mant: self.mant.clone(),
            exp: -(bits - 1),
        };
        // w = (m − 1)/(m + 1), |w| ≤ 1/3; ln m = 2·Σ w^{2j+1}/(2j+1)
        let one = Self::from_u64(1);
        let w = m.sub(&one, prec).div(&m.add(&one, prec), prec);
        let w2 = w.mul(&w, prec);
        let mut term = w.clone();
        let mut sum = w.clone();
        let mut j = 1u64;
        loop {
            term = term.mul(&w2, prec);
            let contrib = term.div_u64(2 * j + 1, prec);
            sum = sum.add(&contrib, prec);
            if contrib.mag2() < sum.mag2() - (prec as i64 + 16) {
                break;
            }
            j += 1;
        }
        let ln_m = sum.mul_u64(2, prec);
        let ln2 = ln2_const(prec);
        let scaled = Self {
            mant: ln2.mant * BigInt::from(pow2),
            exp: ln2.exp,
        }
        .normalized(prec);
        ln_m.add(&scaled, prec)
    }
}

pub fn pi_const(prec: u32) -> Bf {
    Bf::from_decimal(
        "3.14159265358979323846264338327950288419716939937510582097494459230781640629",
        prec,
    )
}

pub fn ln2_const(prec: u32) -> Bf {
    Bf::from_decimal(
        "0.69314718055994530941723212145817656807550013436025525412068000949339362196",
        prec,
    )
}

pub fn euler_gamma_const(prec: u32) -> Bf {
    Bf::from_decimal(
        "0.57721566490153286060651209008240243104215933593992359880576723488486772677",
        prec,
    )
}

/// Working precision for the series at argument `x` and order `n`.
fn precision_for(n: u32, x: f64) -> u32 {
    200 + (1.5 * x).ceil() as u32 + 2 * n
}

/// `J_n(x)` and `Y_n(x)` by arbitrary-precision ascending series.
pub fn oracle_bessel_jy(n: u32, x: f64) -> (f64, f64) {
    let prec = precision_for(n, x);
    let half_x = Bf::from_f64(x * 0.5); // x/2 is exact in f64
    let u = half_x.mul(&half_x, prec); // (x/2)²

    // t_0 = (x/2)^n / n!
    let mut t0 = Bf::from_u64(1);
    for _ in 0..n {
        t0 = t0.mul(&half_x, prec);
    }
    for m in 1..=n as u64 {
        t0 = t0.div_u64(m, prec);
    }

    // J series and the harmonic-weighted companion for Y.
    let mut j_sum = t0.clone();
    let mut harmonic = Bf::zero(); // h_m
    let mut harmonic_shifted = Bf::zero(); // h_{m+n}
    for i in 1..=n as u64 {
        harmonic_shifted = harmonic_shifted.add(&Bf::from_u64(1).div_u64(i, prec), prec);
    }
    let mut h_sum = t0.mul(&harmonic.add(&harmonic_shifted, prec), prec);

    let mut term = t0.clone();
    let mut m = 0u64;
    let mut max_mag = term.mag2();
    loop {
        m += 1;
        // t_{m} = −t_{m−1}·u/(m(n+m))
        term = term.mul(&u, prec).div_u64(m * (n as u64 + m), prec).neg();
        max_mag = max_mag.max(term.mag2());
        j_sum = j_sum.add(&term, prec);
        harmonic = harmonic.add(&Bf::from_u64(1).div_u64(m, prec), prec);
        harmonic_shifted = harmonic_shifted.add(&Bf::from_u64(1).div_u64(m + n as u64, prec), prec);
        let weighted = term.mul(&harmonic.add(&harmonic_shifted, prec), prec);
        h_sum = h_sum.add(&weighted, prec);
        if term.mag2() < max_mag - (prec as i64) && m > 4 {
            break;
        }
    }

    // Finite sum Σ_{m<n} ((n−m−1)!/m!)·(x/2)^{2m−n}
    let mut finite = Bf::zero();
    if n > 0 {
        // t_0 = (n−1)!·(x/2)^{−n}
        let mut t = Bf::from_u64(1);
        for i in 1..n as u64 {
            t = t.mul_u64(i, prec);
        }
        let mut half_pow = Bf::from_u64(1);
        for _ in 0..n {
            half_pow = half_pow.mul(&half_x, prec);
        }
        t = t.div(&half_pow, prec);
        finite = t.clone();
        for m in 0..(n as u64 - 1) {
            // t_{m+1} = t_m·u/((m+1)(n−m−1))
            t = t.mul(&u, prec).div_u64((m + 1) * (n as u64 - m - 1), prec);
            finite = finite.add(&t, prec);
        }
    }

    let pi = pi_const(prec);
    let log_term = Bf::from_f64(x * 0.5)
        .ln(prec)
        .add(&euler_gamma_const(prec), prec);
    // Y_n = (2/π)(ln(x/2) + γ)·J_n − (1/π)·finite − (1/π)·h_sum
    let y = log_term
        .mul(&j_sum, prec)
        .mul_u64(2, prec)
        .sub(&finite, prec)
        .sub(&h_sum, prec)
        .div(&pi, prec);

    (j_sum.to_f64(), y.to_f64())
}

#[allow(dead_code)]
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

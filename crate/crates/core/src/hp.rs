//! Fixed-point high-precision reals for irrational powers and sphere measures.
//!
//! A value is `m · 10^(-scale)` with `m` a big integer. Roots are taken with
//! exact integer `nth_root`, so the only error is truncation at `scale` digits.

use crate::rat::{to_f64, Q};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Default number of fractional decimal digits carried.
pub const DEFAULT_SCALE: u32 = 80;

const PI_100: &str = "31415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpReal {
    m: BigInt,
    scale: u32,
}

fn ten_pow(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

/// Above this root index or numerator, powers go through `exp(e ln x)`.
const MAX_ROOT_INDEX: u32 = 48;

/// `atanh(num/den) · 10^s` for `|num/den| < 1`.
fn fx_atanh(num: &BigInt, den: &BigInt, s: u32) -> BigInt {
    let n2 = num * num;
    let d2 = den * den;
    let mut term = ten_pow(s) * num / den;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !term.is_zero() {
        sum += &term / BigInt::from(2 * k + 1);
        term = term * &n2 / &d2;
        k += 1;
    }
    sum
}

fn fx_ln2(s: u32) -> BigInt {
    fx_atanh(&BigInt::one(), &BigInt::from(3), s) * 2
}

/// `ln x · 10^s` for rational `x > 0`.
fn fx_ln(x: &Q, s: u32) -> BigInt {
    let k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let y = if k >= 0 {
        x / Q::from_integer(BigInt::one() << k as usize)
    } else {
        x * Q::from_integer(BigInt::one() << (-k) as usize)
    };
    // y ∈ (1/2, 2)
    let z = (&y - Q::one()) / (&y + Q::one());
    fx_atanh(z.numer(), z.denom(), s) * 2 + fx_ln2(s) * k
}

/// `exp(v · 10^-s) · 10^s`.
fn fx_exp(v: &BigInt, s: u32) -> BigInt {
    let one = ten_pow(s);
    let ln2 = fx_ln2(s);
    let num: BigInt = v * 2 + &ln2;
    let k = num.div_floor(&(&ln2 * 2));
    let r = v - &k * &ln2;
    const HALVINGS: usize = 12;
    let r = r >> HALVINGS;
    let mut sum = one.clone();
    let mut term = one.clone();
    let mut i = 1u64;
    loop {
        term = term * &r / &one / BigInt::from(i);
        if term.is_zero() {
            break;
        }
        sum += &term;
        i += 1;
    }
    for _ in 0..HALVINGS {
        sum = &sum * &sum / &one;
    }
    let k: i64 = k.try_into().expect("moderate exponent");
    if k >= 0 {
        sum << k as usize
    } else {
        sum >> (-k) as usize
    }
}

impl HpReal {
    pub fn zero() -> Self {
        HpReal { m: BigInt::zero(), scale: DEFAULT_SCALE }
    }

    pub fn from_q(x: &Q) -> Self {
        Self::from_q_scaled(x, DEFAULT_SCALE)
    }

    pub fn from_q_scaled(x: &Q, scale: u32) -> Self {
        let m = (x.numer() * ten_pow(scale)) / x.denom();
        HpReal { m, scale }
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// π truncated to the default scale (100 digits are stored).
    pub fn pi() -> Self {
        let digits: BigInt = PI_100.parse().unwrap();
        let stored = (PI_100.len() - 1) as u32;
        let m = digits / ten_pow(stored - DEFAULT_SCALE);
        HpReal { m, scale: DEFAULT_SCALE }
    }

    /// `base^(exp)` for rational `exp`; requires `base > 0` unless `exp` is an integer.
    pub fn pow_q(base: &Q, exp: &Q) -> crate::Result<Self> {
        Self::pow_q_scaled(base, exp, DEFAULT_SCALE)
    }

    pub fn pow_q_scaled(base: &Q, exp: &Q, scale: u32) -> crate::Result<Self> {
        let a = exp.numer().clone();
        let b = exp.denom().clone();
        if base.is_zero() {
            if exp.is_positive() {
                return Ok(HpReal { m: BigInt::zero(), scale });
            }
            return Err(crate::Error::Domain("zero to a non-positive power".into()));
        }
        let b_u: u32 = b
            .try_into()
            .map_err(|_| crate::Error::Domain("root index too large".into()))?;
        if base.is_negative() && b_u % 2 == 0 {
            return Err(crate::Error::Domain("even root of a negative number".into()));
        }
        if b_u > MAX_ROOT_INDEX || a.abs() > BigInt::from(MAX_ROOT_INDEX) {
            return Ok(Self::pow_q_via_log(base, exp, scale));
        }
        let a_i: i32 = a
            .try_into()
            .map_err(|_| crate::Error::Domain("exponent numerator too large".into()))?;
        let r = crate::rat::pow_i(base, a_i);
        if b_u == 1 {
            return Ok(Self::from_q_scaled(&r, scale));
        }
        let neg = r.is_negative();
        let n = r.numer().abs();
        let d = r.denom().clone();
        // (n/d)^(1/b) = (n d^(b-1))^(1/b) / d
        let radicand = n * num_traits::pow(d.clone(), (b_u - 1) as usize) * ten_pow(scale * b_u);
        let root = radicand.nth_root(b_u);
        let mut m = root / d;
        if neg {
            m = -m;
        }
        Ok(HpReal { m, scale })
    }

    fn pow_q_via_log(base: &Q, exp: &Q, scale: u32) -> Self {
        let neg = base.is_negative() && exp.numer().is_odd();
        let x = base.abs();
        // guard digits grow with the size of the result in either direction
        let mag = (to_f64(exp) * to_f64(&x).log10()).abs().min(1e6) as u32;
        let s = scale + 20 + mag;
        let l = fx_ln(&x, s);
        let v = l * exp.numer() / exp.denom();
        let m = fx_exp(&v, s) / ten_pow(s - scale);
        HpReal { m: if neg { -m } else { m }, scale }
    }

    fn align(&self, other: &Self) -> (BigInt, BigInt, u32) {
        use std::cmp::Ordering::*;
        match self.scale.cmp(&other.scale) {
            Equal => (self.m.clone(), other.m.clone(), self.scale),
            Less => (self.m.clone() * ten_pow(other.scale - self.scale), other.m.clone(), other.scale),
            Greater => (self.m.clone(), other.m.clone() * ten_pow(self.scale - other.scale), self.scale),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b, s) = self.align(other);
        HpReal { m: a + b, scale: s }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b, s) = self.align(other);
        HpReal { m: a - b, scale: s }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b, s) = self.align(other);
        HpReal { m: (a * b) / ten_pow(s), scale: s }
    }

    pub fn mul_q(&self, x: &Q) -> Self {
        HpReal { m: (&self.m * x.numer()) / x.denom(), scale: self.scale }
    }

    pub fn div(&self, other: &Self) -> crate::Result<Self> {
        let (a, b, s) = self.align(other);
        if b.is_zero() {
            return Err(crate::Error::Domain("division by zero".into()));
        }
        Ok(HpReal { m: (a * ten_pow(s)) / b, scale: s })
    }

    pub fn neg(&self) -> Self {
        HpReal { m: -self.m.clone(), scale: self.scale }
    }

    pub fn abs(&self) -> Self {
        HpReal { m: self.m.abs(), scale: self.scale }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn signum(&self) -> i8 {
        match self.m.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// The truncated value as an exact rational.
    pub fn to_q(&self) -> Q {
        Q::new(self.m.clone(), ten_pow(self.scale))
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.to_q())
    }

    /// Decimal rendering with `sig` significant digits (truncated).
    pub fn to_sig_string(&self, sig: usize) -> String {
        if self.m.is_zero() {
            return "0".into();
        }
        let digits = self.m.abs().to_string();
        let int_len = digits.len() as i64 - self.scale as i64;
        let mantissa: String = digits.chars().take(sig.max(1)).collect();
        let sign = if self.m.is_negative() { "-" } else { "" };
        let (first, rest) = mantissa.split_at(1);
        let exp10 = int_len - 1;
        if rest.is_empty() {
            format!("{sign}{first}e{exp10}")
        } else {
            format!("{sign}{first}.{rest}e{exp10}")
        }
    }

    /// Relative distance `|a - b| / |b|` evaluated at full precision.
    pub fn rel_diff(&self, other: &Self) -> f64 {
        let d = self.sub(other).abs();
        if other.is_zero() {
            return d.to_f64();
        }
        to_f64(&(d.to_q() / other.abs().to_q()))
    }
}

impl One for HpReal {
    fn one() -> Self {
        HpReal { m: ten_pow(DEFAULT_SCALE), scale: DEFAULT_SCALE }
    }
}

impl std::ops::Mul for HpReal {
    type Output = HpReal;
    fn mul(self, rhs: Self) -> Self {
        HpReal::mul(&self, &rhs)
    }
}

impl fmt::Display for HpReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sig_string(30))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qi};

    #[test]
    fn log_path_agrees_with_root_path() {
        for (b, e) in [(qi(720), q(1, 3)), (q(7, 5), q(-5, 2)), (qi(3), q(31, 7))] {
            let root = HpReal::pow_q(&b, &e).unwrap();
            let logp = HpReal::pow_q_via_log(&b, &e, DEFAULT_SCALE);
            assert!(root.rel_diff(&logp) < 1e-60, "{b} {e}");
        }
        let big = HpReal::pow_q(&qi(2), &q(1_000_001, 1_000_000)).unwrap();
        assert!((big.to_f64() - 2f64.powf(1.000001)).abs() < 1e-14);
    }

    #[test]
    fn cube_root_of_720() {
        let r = HpReal::pow_q(&qi(720), &q(1, 3)).unwrap();
        assert!((r.to_f64() - 8.962809493114328).abs() < 1e-13);
        // r^3 reproduces 720 to ~75 digits
        let back = r.mul(&r).mul(&r);
        assert!(back.rel_diff(&HpReal::from_q(&qi(720))) < 1e-70);
    }

    #[test]
    fn negative_exponent_and_odd_root() {
        let r = HpReal::pow_q(&qi(8), &q(-2, 3)).unwrap();
        assert!((r.to_f64() - 0.25).abs() < 1e-15);
        let r = HpReal::pow_q(&qi(-27), &q(1, 3)).unwrap();
        assert!((r.to_f64() + 3.0).abs() < 1e-15);
        assert!(HpReal::pow_q(&qi(-4), &q(1, 2)).is_err());
    }

    #[test]
    fn pi_digits() {
        assert!((HpReal::pi().to_f64() - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(HpReal::pi().to_sig_string(12), "3.14159265358e0");
    }
}

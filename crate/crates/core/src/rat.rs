//! Thin helpers around `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Parses `"a/b"`, `"a"` or a finite decimal such as `"3.5"`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        return Some(Q::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let mut num: BigInt = digits.parse().ok()?;
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Some(Q::new(num, den));
    }
    let a: BigInt = s.parse().ok()?;
    Some(Q::from_integer(a))
}

/// Canonical `"a/b"` (or `"a"` for integers) rendering.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back on shifting when numerator/denominator overflow f64.
    let n = x.numer();
    let d = x.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
    let n2: BigInt = n >> shift;
    let d2: BigInt = d >> shift;
    n2.to_f64().unwrap_or(f64::NAN) / d2.to_f64().unwrap_or(f64::NAN)
}

pub fn pow_i(x: &Q, k: i32) -> Q {
    if k >= 0 {
        num_traits::pow(x.clone(), k as usize)
    } else {
        Q::one() / num_traits::pow(x.clone(), (-k) as usize)
    }
}

pub fn sign(x: &Q) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Exact conversion from a finite f64.
pub fn from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("7/2"), Some(q(7, 2)));
        assert_eq!(parse_q(" 4 "), Some(qi(4)));
        assert_eq!(parse_q("3.5"), Some(q(7, 2)));
        assert_eq!(parse_q("-0.25"), Some(q(-1, 4)));
        assert_eq!(parse_q("abc"), None);
        assert_eq!(parse_q("1/0"), None);
    }

    #[test]
    fn format_roundtrip() {
        for x in [q(7, 2), qi(-3), q(-5, 9)] {
            assert_eq!(parse_q(&fmt_q(&x)), Some(x));
        }
    }

    #[test]
    fn huge_to_f64() {
        let big = pow_i(&qi(10), 400) / pow_i(&qi(10), 399);
        assert!((to_f64(&big) - 10.0).abs() < 1e-12);
    }
}

/// Serde adapter writing rationals as `"a/b"` strings.
pub mod qser {
    use super::{fmt_q, parse_q, Q};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).ok_or_else(|| D::Error::custom(format!("not a rational: {s}")))
    }
}

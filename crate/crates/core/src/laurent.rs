//! Laurent polynomials `Σ c_k x^k` with exact rational coefficients.

use crate::error::{Error, Result};
use crate::rat::{fmt_q, pow_i, qi, Q};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, Q>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Q, k: i32) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        LaurentPoly { coeffs }
    }

    /// Builds from `(exponent, coefficient)` pairs, merging repeats.
    pub fn from_terms<I: IntoIterator<Item = (i32, Q)>>(terms: I) -> Self {
        let mut out = LaurentPoly::zero();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    pub fn add_term(&mut self, k: i32, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(k).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: i32) -> Q {
        self.coeffs.get(&k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Q)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// Multiply by `x^s`.
    pub fn shift(&self, s: i32) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(k, v)| (k + s, v.clone())).collect() }
    }

    pub fn derivative(&self) -> Self {
        LaurentPoly::from_terms(self.coeffs.iter().map(|(k, v)| (k - 1, v * qi(*k as i64))))
    }

    pub fn eval(&self, x: &Q) -> Result<Q> {
        if x.is_zero() {
            if self.min_exp().is_some_and(|k| k < 0) {
                return Err(Error::Pole { var: "x" });
            }
            return Ok(self.coeff(0));
        }
        Ok(self.coeffs.iter().fold(Q::zero(), |acc, (k, c)| acc + c * pow_i(x, *k)))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, c)| crate::rat::to_f64(c) * x.powi(*k))
            .sum()
    }

    /// `lim_{x→±∞} x^s · self` when it exists (all exponents ≤ -s).
    pub fn limit_times_power(&self, s: i32) -> Option<Q> {
        match self.max_exp() {
            None => Some(Q::zero()),
            Some(m) if m + s < 0 => Some(Q::zero()),
            Some(m) if m + s == 0 => Some(self.coeff(m)),
            _ => None,
        }
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().rev() {
            let cs = fmt_q(c);
            parts.push(match k {
                0 => cs,
                1 => format!("({cs})*{var}"),
                _ => format!("({cs})*{var}^{k}"),
            });
        }
        parts.join(" + ")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("x"))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.coeffs {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(k, v)| (*k, -v.clone())).collect() }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &rhs.coeffs {
                out.add_term(a + b, ca * cb);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;
    use proptest::prelude::*;

    fn lp(terms: &[(i32, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().map(|(k, c)| (*k, qi(*c))))
    }

    #[test]
    fn arithmetic() {
        let a = lp(&[(-1, 2), (0, 1)]);
        let b = lp(&[(1, 3)]);
        assert_eq!(&a * &b, lp(&[(0, 6), (1, 3)]));
        assert!((&a - &a).is_zero());
        assert_eq!(a.derivative(), lp(&[(-2, -2)]));
        assert_eq!(a.eval(&q(1, 2)).unwrap(), qi(5));
        assert!(a.eval(&qi(0)).is_err());
        assert_eq!(b.eval(&qi(0)).unwrap(), qi(0));
    }

    #[test]
    fn limits() {
        let a = lp(&[(-1, 7), (-3, 2)]);
        assert_eq!(a.limit_times_power(1), Some(qi(7)));
        assert_eq!(a.limit_times_power(0), Some(qi(0)));
        assert_eq!(a.limit_times_power(2), None);
    }

    fn arb_lp() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-4i32..4, -9i64..9), 0..5)
            .prop_map(|v| LaurentPoly::from_terms(v.into_iter().map(|(k, c)| (k, qi(c)))))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_lp(), b in arb_lp(), c in arb_lp()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            // Leibniz rule
            prop_assert_eq!((&a * &b).derivative(), &(&a.derivative() * &b) + &(&a * &b.derivative()));
        }

        #[test]
        fn no_stored_zeros(a in arb_lp(), b in arb_lp()) {
            let s = &a - &b;
            prop_assert!(s.terms().all(|(_, c)| !c.is_zero()));
        }
    }
}

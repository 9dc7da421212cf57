//! Exact sums of rational multiples of `B^e` for a rational radicand `B > 0`
//! and fractional exponent `e ∈ [0,1)`.

use crate::rat::{fmt_q, pow_i, Q};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SurdSum {
    terms: BTreeMap<(Q, Q), Q>,
}

impl SurdSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(c: Q) -> Self {
        let mut s = Self::zero();
        s.add_power(c, Q::one(), Q::zero());
        s
    }

    /// `c · base^exp`; the integer part of `exp` is folded into the coefficient.
    pub fn power(c: Q, base: Q, exp: Q) -> Self {
        let mut s = Self::zero();
        s.add_power(c, base, exp);
        s
    }

    pub fn add_power(&mut self, c: Q, base: Q, exp: Q) {
        assert!(base.is_positive(), "radicand must be positive");
        let fl = exp.numer().div_floor(exp.denom());
        let ipart = fl.to_i32().expect("moderate exponent");
        let frac = &exp - Q::from_integer(fl);
        let c = c * pow_i(&base, ipart);
        if c.is_zero() {
            return;
        }
        let key = if frac.is_zero() { (Q::one(), Q::zero()) } else { (base, frac) };
        let slot = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((b, e), c) in &other.terms {
            out.add_power(c.clone(), b.clone(), e.clone());
        }
        out
    }

    pub fn scale(&self, k: &Q) -> Self {
        let mut out = Self::zero();
        for ((b, e), c) in &self.terms {
            out.add_power(c * k, b.clone(), e.clone());
        }
        out
    }

    /// Exactly zero in the canonical form. Distinct `(base, exp)` keys with the
    /// same base are linearly independent over `Q` for the cases used here.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|((b, e), c)| crate::rat::to_f64(c) * crate::rat::to_f64(b).powf(crate::rat::to_f64(e)))
            .sum()
    }
}

impl fmt::Display for SurdSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((b, e), c)| {
                if e.is_zero() {
                    fmt_q(c)
                } else {
                    format!("{}*({})^({})", fmt_q(c), fmt_q(b), fmt_q(e))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

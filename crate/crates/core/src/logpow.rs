//! Finite sums `Σ c_{a,j} x^a L^{b-j}` with `L = -ln x`, for `x ∈ (0,1)`.

use crate::diffop::{BaseVar, DiffOp};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::rat::{fmt_q, qi, to_f64, Q};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogPowerExpr {
    /// Base log exponent `b`.
    b: Q,
    terms: BTreeMap<(Q, u32), Q>,
}

impl LogPowerExpr {
    pub fn zero(b: Q) -> Self {
        LogPowerExpr { b, terms: BTreeMap::new() }
    }

    /// `c · x^a · L^b`.
    pub fn monomial(c: Q, a: Q, b: Q) -> Self {
        let mut e = Self::zero(b);
        e.add_term(a, 0, c);
        e
    }

    /// Pure power `x^a` (log exponent 0).
    pub fn power(a: Q) -> Self {
        Self::monomial(Q::one(), a, Q::zero())
    }

    pub fn log_base(&self) -> &Q {
        &self.b
    }

    pub fn add_term(&mut self, a: Q, j: u32, c: Q) {
        if c.is_zero() {
            return;
        }
        let key = (a, j);
        let slot = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: &Q, j: u32) -> Q {
        self.terms.get(&(a.clone(), j)).cloned().unwrap_or_else(Q::zero)
    }

    /// Iterates `(power a, downshift j, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&Q, u32, &Q)> {
        self.terms.iter().map(|((a, j), c)| (a, *j, c))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.b != other.b {
            return Err(Error::Domain("log base exponents differ".into()));
        }
        let mut out = self.clone();
        for ((a, j), c) in &other.terms {
            out.add_term(a.clone(), *j, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.b.clone());
        for ((a, j), v) in &self.terms {
            out.add_term(a.clone(), *j, v * c);
        }
        out
    }

    pub fn mul_laurent(&self, f: &LaurentPoly) -> Self {
        let mut out = Self::zero(self.b.clone());
        for ((a, j), v) in &self.terms {
            for (k, c) in f.terms() {
                out.add_term(a + qi(k as i64), *j, v * c);
            }
        }
        out
    }

    /// `d/dx`, using `d(x^a L^e) = a x^{a-1} L^e - e x^{a-1} L^{e-1}`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(self.b.clone());
        for ((a, j), c) in &self.terms {
            let a1 = a - Q::one();
            out.add_term(a1.clone(), *j, a * c);
            let e = &self.b - qi(*j as i64);
            out.add_term(a1, j + 1, -(e * c));
        }
        out
    }

    /// Dominant term as `x → 0⁺`: most negative power, then largest log exponent.
    pub fn leading_term(&self) -> Option<(Q, u32, Q)> {
        self.terms
            .iter()
            .min_by(|((a1, j1), _), ((a2, j2), _)| a1.cmp(a2).then(j1.cmp(j2)))
            .map(|((a, j), c)| (a.clone(), *j, c.clone()))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let l = -x.ln();
        self.terms
            .iter()
            .map(|((a, j), c)| {
                let e = to_f64(&(&self.b - qi(*j as i64)));
                to_f64(c) * x.powf(to_f64(a)) * l.powf(e)
            })
            .sum()
    }
}

impl fmt::Display for LogPowerExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, j), c)| {
                let e = &self.b - qi(*j as i64);
                format!("({}) x^({}) L^({})", fmt_q(c), fmt_q(a), fmt_q(&e))
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Exact action of an `r`-operator on a log-power expression, with `Λ = mu`.
pub fn apply(op: &DiffOp, expr: &LogPowerExpr, mu: &Q) -> Result<LogPowerExpr> {
    if op.base() != BaseVar::R {
        return Err(Error::BaseVarMismatch);
    }
    let mut out = LogPowerExpr::zero(expr.b.clone());
    let max_d = op.order();
    let mut derivs = vec![expr.clone()];
    for _ in 0..max_d {
        let next = derivs.last().unwrap().derivative();
        derivs.push(next);
    }
    for ((d, a), c) in op.terms() {
        let w = crate::rat::pow_i(mu, a as i32);
        let term = derivs[d as usize].mul_laurent(c).scale(&w);
        out = out.add(&term)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn derivative_rule() {
        // d/dx (x^2 L^{1/2}) = 2x L^{1/2} - (1/2) x L^{-1/2}
        let e = LogPowerExpr::monomial(qi(1), qi(2), q(1, 2));
        let d = e.derivative();
        assert_eq!(d.coeff(&qi(1), 0), qi(2));
        assert_eq!(d.coeff(&qi(1), 1), q(-1, 2));
    }

    #[test]
    fn numeric_derivative_agrees() {
        let e = LogPowerExpr::monomial(qi(3), q(-5, 2), q(-1, 6));
        let d = e.derivative();
        let x = 0.01;
        let h = 1e-7;
        let fd = (e.eval_f64(x + h) - e.eval_f64(x - h)) / (2.0 * h);
        assert!((fd / d.eval_f64(x) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn leading() {
        let mut e = LogPowerExpr::zero(qi(0));
        e.add_term(qi(-3), 2, qi(5));
        e.add_term(qi(-3), 1, qi(7));
        e.add_term(qi(-1), 0, qi(1));
        assert_eq!(e.leading_term(), Some((qi(-3), 1, qi(7))));
    }
}

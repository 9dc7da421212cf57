//! Formal polynomials in the jet `v₀ … v₆`, the nonlinearity `N = |v|^{p-1}v`
//! and its primitive `F = |v|^{p+1}/(p+1)`, with exact coefficients.

use crate::error::{Error, Result};
use crate::rat::{fmt_q, to_f64, Q};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Number of formal symbols: `v₀..v₆`, `N`, `F`.
pub const SYMBOLS: usize = 9;
pub const N_SYM: usize = 7;
pub const F_SYM: usize = 8;

type Mono = [u8; SYMBOLS];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JetPolynomial {
    terms: BTreeMap<Mono, Q>,
}

fn sym_name(i: usize) -> String {
    match i {
        N_SYM => "N".into(),
        F_SYM => "F".into(),
        k => format!("v{k}"),
    }
}

impl JetPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut out = Self::zero();
        out.add_term([0; SYMBOLS], c);
        out
    }

    /// The symbol with index `i` (`0..=6` jet, 7 `N`, 8 `F`).
    pub fn var(i: usize) -> Self {
        let mut m = [0; SYMBOLS];
        m[i] = 1;
        let mut out = Self::zero();
        out.add_term(m, Q::one());
        out
    }

    pub fn nonlinearity() -> Self {
        Self::var(N_SYM)
    }

    pub fn primitive() -> Self {
        Self::var(F_SYM)
    }

    fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8; SYMBOLS], &Q)> {
        self.terms.iter()
    }

    /// Coefficient of the monomial `Π symᵢ^{eᵢ}` given as `(index, power)` pairs.
    pub fn coeff(&self, factors: &[(usize, u8)]) -> Q {
        let mut m = [0; SYMBOLS];
        for (i, e) in factors {
            m[*i] += e;
        }
        self.terms.get(&m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, k: &Q) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, c * k);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let m: Mono = std::array::from_fn(|i| a[i] + b[i]);
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    /// Whether any term involves `N` or `F`.
    pub fn has_nonlinear_terms(&self) -> bool {
        self.terms.keys().any(|m| m[N_SYM] > 0 || m[F_SYM] > 0)
    }

    /// Formal `d/dt` with `vᵢ' = vᵢ₊₁` and `F' = N v₁`. Fails on `v₆` and on
    /// `N`, whose derivatives leave the algebra.
    pub fn derivative(&self) -> Result<Self> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m[6] > 0 || m[N_SYM] > 0 {
                return Err(Error::Domain("derivative of v6 or N is outside the jet algebra".into()));
            }
            for i in 0..SYMBOLS {
                if m[i] == 0 {
                    continue;
                }
                let mut base = *m;
                base[i] -= 1;
                let k = c * Q::from_integer(m[i].into());
                if i == F_SYM {
                    base[N_SYM] += 1;
                    base[1] += 1;
                } else {
                    base[i + 1] += 1;
                }
                out.add_term(base, k);
            }
        }
        Ok(out)
    }

    /// Replaces `v₆` by `-Σ Kⱼ vⱼ - N`.
    pub fn substitute_top(&self, k: &[Q; 6]) -> Self {
        let mut top = JetPolynomial::nonlinearity().scale(&-Q::one());
        for (j, kj) in k.iter().enumerate() {
            top = top.add(&JetPolynomial::var(j).scale(&-kj.clone()));
        }
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut rest = *m;
            let e = rest[6];
            rest[6] = 0;
            let mut term = Self::zero();
            term.add_term(rest, c.clone());
            for _ in 0..e {
                term = term.mul(&top);
            }
            out = out.add(&term);
        }
        out
    }

    /// Numeric value at a jet `(v₀..v₆)` with `N`, `F` given.
    pub fn eval(&self, jet: &[f64; 7], n_val: f64, f_val: f64) -> f64 {
        let mut vals = [0.0; SYMBOLS];
        vals[..7].copy_from_slice(jet);
        vals[N_SYM] = n_val;
        vals[F_SYM] = f_val;
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut x = to_f64(c);
                for (i, e) in m.iter().enumerate() {
                    if *e > 0 {
                        x *= vals[i].powi(*e as i32);
                    }
                }
                x
            })
            .sum()
    }
}

impl fmt::Display for JetPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let mut s = fmt_q(c);
                for (i, e) in m.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => s.push_str(&format!("*{}", sym_name(i))),
                        _ => s.push_str(&format!("*{}^{e}", sym_name(i))),
                    }
                }
                s
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qi;
    use proptest::prelude::*;

    fn v(i: usize) -> JetPolynomial {
        JetPolynomial::var(i)
    }

    #[test]
    fn primitive_rule() {
        let d = JetPolynomial::primitive().derivative().unwrap();
        assert_eq!(d, JetPolynomial::nonlinearity().mul(&v(1)));
    }

    #[test]
    fn top_derivative_rejected() {
        assert!(v(6).derivative().is_err());
        assert!(JetPolynomial::nonlinearity().derivative().is_err());
    }

    #[test]
    fn substitution() {
        let k = [qi(1), qi(2), qi(3), qi(4), qi(5), qi(6)];
        let s = v(6).mul(&v(1)).substitute_top(&k);
        assert_eq!(s.coeff(&[(1, 1), (N_SYM, 1)]), qi(-1));
        assert_eq!(s.coeff(&[(1, 2)]), qi(-2));
        assert_eq!(s.coeff(&[(5, 1), (1, 1)]), qi(-6));
        assert!(!s.terms().any(|(m, _)| m[6] > 0));
    }

    #[test]
    fn eval_monomials() {
        let p = v(1).mul(&v(1)).scale(&qi(3)).add(&JetPolynomial::primitive());
        let jet = [0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(p.eval(&jet, 0.0, 0.5), 12.5);
    }

    proptest! {
        #[test]
        fn leibniz(a in 0usize..5, b in 0usize..5, c in -5i64..5) {
            let p = v(a).scale(&qi(c));
            let q = v(b).mul(&v(a));
            let lhs = p.mul(&q).derivative().unwrap();
            let rhs = p.derivative().unwrap().mul(&q).add(&p.mul(&q.derivative().unwrap()));
            prop_assert_eq!(lhs, rhs);
        }
    }
}

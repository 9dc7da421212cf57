//! Differential operators `Σ f_{d,a}(x) ∂^d Λ^a` over Laurent coefficients.
//!
//! `Λ` is a commuting symbol standing for the angular Laplacian. Terms are
//! stored in normal order with coefficients to the left of `∂`.

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::rat::{qi, Q};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseVar {
    R,
    T,
}

impl BaseVar {
    pub fn name(self) -> &'static str {
        match self {
            BaseVar::R => "r",
            BaseVar::T => "t",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    terms: BTreeMap<(u32, u32), LaurentPoly>,
    base: BaseVar,
}

fn binom(n: u32, k: u32) -> Q {
    let mut acc = Q::from_integer(1.into());
    for i in 0..k {
        acc = acc * qi((n - i) as i64) / qi((i + 1) as i64);
    }
    acc
}

impl DiffOp {
    pub fn zero(base: BaseVar) -> Self {
        DiffOp { terms: BTreeMap::new(), base }
    }

    pub fn identity(base: BaseVar) -> Self {
        Self::term(base, 0, 0, LaurentPoly::one())
    }

    /// `f · ∂^d Λ^a`.
    pub fn term(base: BaseVar, d: u32, a: u32, f: LaurentPoly) -> Self {
        let mut op = Self::zero(base);
        op.add_term(d, a, f);
        op
    }

    pub fn derivative(base: BaseVar) -> Self {
        Self::term(base, 1, 0, LaurentPoly::one())
    }

    pub fn lambda(base: BaseVar) -> Self {
        Self::term(base, 0, 1, LaurentPoly::one())
    }

    pub fn multiplier(base: BaseVar, f: LaurentPoly) -> Self {
        Self::term(base, 0, 0, f)
    }

    pub fn constant(base: BaseVar, c: Q) -> Self {
        Self::multiplier(base, LaurentPoly::constant(c))
    }

    pub fn base(&self) -> BaseVar {
        self.base
    }

    pub fn add_term(&mut self, d: u32, a: u32, f: LaurentPoly) {
        if f.is_zero() {
            return;
        }
        let slot = self.terms.entry((d, a)).or_default();
        *slot = &*slot + &f;
        if slot.is_zero() {
            self.terms.remove(&(d, a));
        }
    }

    pub fn coeff(&self, d: u32, a: u32) -> LaurentPoly {
        self.terms.get(&(d, a)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &LaurentPoly)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|(d, _)| *d).max().unwrap_or(0)
    }

    pub fn add(&self, other: &DiffOp) -> Result<DiffOp> {
        if self.base != other.base {
            return Err(Error::BaseVarMismatch);
        }
        let mut out = self.clone();
        for ((d, a), f) in &other.terms {
            out.add_term(*d, *a, f.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiffOp) -> Result<DiffOp> {
        self.add(&other.scale(&qi(-1)))
    }

    pub fn scale(&self, c: &Q) -> DiffOp {
        let mut out = Self::zero(self.base);
        if c.is_zero() {
            return out;
        }
        for ((d, a), f) in &self.terms {
            out.add_term(*d, *a, f.scale(c));
        }
        out
    }

    /// `self ∘ other`, using `∂^d ∘ g = Σ_k C(d,k) g^{(k)} ∂^{d-k}`.
    pub fn compose(&self, other: &DiffOp) -> Result<DiffOp> {
        if self.base != other.base {
            return Err(Error::BaseVarMismatch);
        }
        let mut out = Self::zero(self.base);
        for ((d, a), f) in &self.terms {
            for ((e, b), g) in &other.terms {
                let mut gk = g.clone();
                for k in 0..=*d {
                    if gk.is_zero() {
                        break;
                    }
                    let c = binom(*d, k);
                    out.add_term(d - k + e, a + b, (f * &gk).scale(&c));
                    gk = gk.derivative();
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> DiffOp {
        let mut acc = Self::identity(self.base);
        for _ in 0..k {
            acc = acc.compose(self).expect("same base");
        }
        acc
    }

    /// Replaces `Λ` by the scalar `mu` (an angular eigenvalue).
    pub fn at_lambda(&self, mu: &Q) -> DiffOp {
        let mut out = Self::zero(self.base);
        for ((d, a), f) in &self.terms {
            out.add_term(*d, 0, f.scale(&crate::rat::pow_i(mu, *a as i32)));
        }
        out
    }

    /// For a constant-coefficient operator `Σ c_{d,a} ∂^d Λ^a`, returns
    /// `Σ c_{d,a} R^d Λ^a` with `R` substituted for `∂`.
    pub fn substitute_derivative(&self, replacement: &DiffOp) -> Result<DiffOp> {
        let base = replacement.base;
        let mut out = Self::zero(base);
        let max_d = self.order();
        let mut powers = vec![Self::identity(base)];
        for _ in 0..max_d {
            let next = powers.last().unwrap().compose(replacement)?;
            powers.push(next);
        }
        for ((d, a), f) in &self.terms {
            if f.terms().any(|(k, _)| k != 0) {
                return Err(Error::Domain("substitution requires constant coefficients".into()));
            }
            let c = f.coeff(0);
            let lam = Self::term(base, 0, *a, LaurentPoly::one());
            out = out.add(&powers[*d as usize].compose(&lam)?.scale(&c))?;
        }
        Ok(out)
    }

    /// Applies the operator (at `Λ = mu`) to a Laurent polynomial.
    pub fn apply_laurent(&self, f: &LaurentPoly, mu: &Q) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for ((d, a), c) in &self.terms {
            let mut g = f.clone();
            for _ in 0..*d {
                g = g.derivative();
            }
            out = &out + &(c * &g).scale(&crate::rat::pow_i(mu, *a as i32));
        }
        out
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let v = self.base.name();
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|((d, a), c)| format!("[{}] d{v}^{d} Λ^{a}", c.to_string_in(v)))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn commutator() {
        let d = DiffOp::derivative(BaseVar::R);
        let x = DiffOp::multiplier(BaseVar::R, LaurentPoly::monomial(qi(1), 1));
        let lhs = d.compose(&x).unwrap();
        let mut expect = DiffOp::term(BaseVar::R, 1, 0, LaurentPoly::monomial(qi(1), 1));
        expect.add_term(0, 0, LaurentPoly::one());
        assert_eq!(lhs, expect);
    }

    #[test]
    fn base_mismatch() {
        let a = DiffOp::derivative(BaseVar::R);
        let b = DiffOp::derivative(BaseVar::T);
        assert_eq!(a.compose(&b), Err(Error::BaseVarMismatch));
    }

    fn arb_op() -> impl Strategy<Value = DiffOp> {
        proptest::collection::vec((0u32..3, 0u32..2, -2i32..2, -5i64..5), 0..4).prop_map(|v| {
            let mut op = DiffOp::zero(BaseVar::R);
            for (d, a, k, c) in v {
                op.add_term(d, a, LaurentPoly::monomial(qi(c), k));
            }
            op
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn associativity(a in arb_op(), b in arb_op(), c in arb_op()) {
            let l = a.compose(&b).unwrap().compose(&c).unwrap();
            let r = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn distributivity(a in arb_op(), b in arb_op(), c in arb_op()) {
            let l = a.compose(&b.add(&c).unwrap()).unwrap();
            let r = a.compose(&b).unwrap().add(&a.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn action_is_compatible_with_composition(a in arb_op(), b in arb_op(),
                                                  f in proptest::collection::vec((-3i32..4, -5i64..5), 1..4)) {
            let f = LaurentPoly::from_terms(f.into_iter().map(|(k, c)| (k, qi(c))));
            let mu = qi(3);
            let lhs = a.compose(&b).unwrap().apply_laurent(&f, &mu);
            let rhs = a.apply_laurent(&b.apply_laurent(&f, &mu), &mu);
            prop_assert_eq!(lhs, rhs);
        }
    }
}

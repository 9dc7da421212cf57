//! Parameters, critical exponents, regimes and the named constants.

use crate::error::{Error, Result};
use crate::hp::HpReal;
use crate::rat::{fmt_q, q, qi, Q};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Dimension `n ≥ 7` and exponent `p > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    n: i64,
    p: Q,
}

impl Params {
    pub fn new(n: i64, p: Q) -> Result<Self> {
        if n < 7 {
            return Err(Error::InvalidParams(format!("n = {n} < 7")));
        }
        if p <= Q::one() {
            return Err(Error::InvalidParams(format!("p = {} must exceed 1", fmt_q(&p))));
        }
        Ok(Params { n, p })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn p(&self) -> &Q {
        &self.p
    }

    pub fn n_q(&self) -> Q {
        qi(self.n)
    }

    pub fn p_f64(&self) -> f64 {
        crate::rat::to_f64(&self.p)
    }

    pub fn gamma(&self) -> Q {
        gamma(&self.p).expect("p > 1 by construction")
    }

    pub fn exponents(&self) -> CriticalExponents {
        CriticalExponents::new(self.n, &self.p)
    }

    /// Params at the lower critical exponent `2_# = n/(n-6)`.
    pub fn lower_critical(n: i64) -> Result<Self> {
        Params::new(n, lower_critical(n))
    }

    /// Params at `2^# - 1 = (n+6)/(n-6)`.
    pub fn upper_critical(n: i64) -> Result<Self> {
        Params::new(n, upper_critical(n) - Q::one())
    }
}

pub fn lower_critical(n: i64) -> Q {
    q(n, n - 6)
}

pub fn upper_critical(n: i64) -> Q {
    q(2 * n, n - 6)
}

/// `γ = 6/(p-1)`.
pub fn gamma(p: &Q) -> Result<Q> {
    let d = p - Q::one();
    if d.is_zero() {
        return Err(Error::Domain("gamma undefined at p = 1".into()));
    }
    Ok(qi(6) / d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalExponents {
    #[serde(with = "crate::rat::qser")]
    pub lower: Q,
    #[serde(with = "crate::rat::qser")]
    pub upper: Q,
    #[serde(with = "crate::rat::qser")]
    pub gamma: Q,
}

impl CriticalExponents {
    pub fn new(n: i64, p: &Q) -> Self {
        CriticalExponents {
            lower: lower_critical(n),
            upper: upper_critical(n),
            gamma: gamma(p).expect("p != 1"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Regime {
    SerrinLions,
    Aviles,
    GidasSpruck,
    UpperCritical,
    Supercritical,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::SerrinLions => "serrin-lions",
            Regime::Aviles => "aviles",
            Regime::GidasSpruck => "gidas-spruck",
            Regime::UpperCritical => "upper-critical",
            Regime::Supercritical => "supercritical",
        }
    }

    /// Whether downstream experiments support this regime.
    pub fn supported(self) -> bool {
        !matches!(self, Regime::Supercritical)
    }
}

pub fn classify_regime(params: &Params) -> Regime {
    let lo = lower_critical(params.n);
    let up1 = upper_critical(params.n) - Q::one();
    let p = &params.p;
    if *p < lo {
        Regime::SerrinLions
    } else if *p == lo {
        Regime::Aviles
    } else if *p < up1 {
        Regime::GidasSpruck
    } else if *p == up1 {
        Regime::UpperCritical
    } else {
        Regime::Supercritical
    }
}

/// `γ(γ+2)(γ+4)(n-2-γ)(n-4-γ)(n-6-γ)`.
pub fn k0_product(params: &Params) -> Q {
    let g = params.gamma();
    let n = params.n_q();
    let two = qi(2);
    let four = qi(4);
    let six = qi(6);
    &g * (&g + &two) * (&g + &four) * (&n - &two - &g) * (&n - &four - &g) * (&n - &six - &g)
}

/// `(4/3)(n-2)(n-4)(n-6)²`.
pub fn k0_hat(n: i64) -> Q {
    q(4, 3) * qi((n - 2) * (n - 4) * (n - 6) * (n - 6))
}

/// `((p-1)/(2(p+1))) K₀^{(p+1)/(p-1)}`; defined only when `K₀ > 0`.
pub fn ell_star(params: &Params) -> Result<HpReal> {
    let k0 = k0_product(params);
    if !k0.is_positive() {
        return Err(Error::Domain(format!("K0 = {} is not positive", fmt_q(&k0))));
    }
    let p = params.p();
    let pre = (p - Q::one()) / (qi(2) * (p + Q::one()));
    let e = (p + Q::one()) / (p - Q::one());
    Ok(HpReal::pow_q(&k0, &e)?.mul_q(&pre))
}

/// Magnitude `(3/(2(n-3))) K̂₀^{(n-3)/3}`; sign conventions are reported by
/// [`aviles_level_candidates`].
pub fn ell_star_sharp(n: i64) -> HpReal {
    let e = q(n - 3, 3);
    HpReal::pow_q(&k0_hat(n), &e)
        .expect("k0_hat > 0 for n >= 7")
        .mul_q(&q(3, 2 * (n - 3)))
}

/// Candidate values for the nonzero Aviles limit level, each a multiple of
/// `K̂₀^{(n-3)/3}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AvilesLevels {
    pub n: i64,
    /// `3/(2(n-3))`, the stated coefficient.
    pub stated_coefficient: String,
    pub stated_value: f64,
    /// `3(n-4)/(2(n-3))`, from substituting `w₀ = K̂₀^{(n-6)/6}` into the limit formula with `K̂₀|w₀|²`.
    pub substituted_coefficient: String,
    pub substituted_value: f64,
    /// `(2n-9)/(2(n-3))`, from the functional's own `t K̃₀ / 2` weight.
    pub half_weight_coefficient: String,
    pub half_weight_value: f64,
    /// `lim t K̃₀` under the convention `K̂ = lim t K̃` and its negation.
    pub k0_hat_plus: String,
    pub k0_hat_minus: String,
}

pub fn aviles_level_candidates(n: i64) -> AvilesLevels {
    let base = HpReal::pow_q(&k0_hat(n), &q(n - 3, 3)).expect("positive");
    let c1 = q(3, 2 * (n - 3));
    let c2 = q(3 * (n - 4), 2 * (n - 3));
    let c3 = q(2 * n - 9, 2 * (n - 3));
    AvilesLevels {
        n,
        stated_coefficient: fmt_q(&c1),
        stated_value: base.mul_q(&c1).to_f64(),
        substituted_coefficient: fmt_q(&c2),
        substituted_value: base.mul_q(&c2).to_f64(),
        half_weight_coefficient: fmt_q(&c3),
        half_weight_value: base.mul_q(&c3).to_f64(),
        k0_hat_plus: fmt_q(&k0_hat(n)),
        k0_hat_minus: fmt_q(&-k0_hat(n)),
    }
}

/// `ω_{n-1} = 2π^{n/2}/Γ(n/2)` held as `coeff · π^pi_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereMeasure {
    pub coeff: Q,
    pub pi_power: u32,
}

impl SphereMeasure {
    pub fn value(&self) -> HpReal {
        let pi = HpReal::pi();
        let mut acc = HpReal::from_q(&self.coeff);
        for _ in 0..self.pi_power {
            acc = acc.mul(&pi);
        }
        acc
    }
}

fn sphere_measure_uncached(n: i64) -> SphereMeasure {
    if n % 2 == 0 {
        // 2 π^k / (k-1)!, k = n/2
        let k = n / 2;
        let fact: i64 = (1..k).product();
        SphereMeasure { coeff: q(2, fact.max(1)), pi_power: k as u32 }
    } else {
        // 2^{(n+1)/2} π^{(n-1)/2} / (n-2)!!
        let mut dfact = Q::one();
        let mut k = n - 2;
        while k > 1 {
            dfact *= qi(k);
            k -= 2;
        }
        let pow2 = num_traits::pow(qi(2), ((n + 1) / 2) as usize);
        SphereMeasure { coeff: pow2 / dfact, pi_power: ((n - 1) / 2) as u32 }
    }
}

/// Cached for `n ≤ 32`.
pub fn sphere_measure(n: i64) -> SphereMeasure {
    static CACHE: OnceLock<Vec<SphereMeasure>> = OnceLock::new();
    if (1..=32).contains(&n) {
        let table = CACHE.get_or_init(|| (1..=32).map(sphere_measure_uncached).collect());
        return table[(n - 1) as usize].clone();
    }
    sphere_measure_uncached(n)
}

pub fn omega(n: i64) -> HpReal {
    sphere_measure(n).value()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedConstants {
    #[serde(with = "crate::rat::qser")]
    pub k0_product: Q,
    #[serde(with = "crate::rat::qser")]
    pub k0_hat: Q,
    pub ell_star: Option<f64>,
    pub ell_star_sharp: f64,
    pub omega: f64,
}

impl NamedConstants {
    pub fn compute(params: &Params) -> Self {
        NamedConstants {
            k0_product: k0_product(params),
            k0_hat: k0_hat(params.n()),
            ell_star: ell_star(params).ok().map(|x| x.to_f64()),
            ell_star_sharp: ell_star_sharp(params.n()).to_f64(),
            omega: omega(params.n()).to_f64(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderConstants {
    pub m: u32,
    /// Homogeneous-solution constant from the closed product formula.
    #[serde(with = "crate::rat::qser")]
    pub k0_m: Q,
    /// Log-corrected constant from the general-order conjectured formula.
    #[serde(with = "crate::rat::qser")]
    pub k0_hat_conjecture: Q,
    /// The proven hat constant for the same order.
    #[serde(with = "crate::rat::qser")]
    pub k0_hat_theorem: Q,
}

/// Closed-form constants for `(-Δ)^m`, `m ∈ {1,2,3}`.
pub fn general_order_constants(n: i64, m: u32, p: &Q) -> Result<OrderConstants> {
    if !(1..=3).contains(&m) {
        return Err(Error::InvalidParams(format!("order m = {m} not in 1..=3")));
    }
    if n <= 2 * m as i64 {
        return Err(Error::InvalidParams(format!("n = {n} must exceed 2m = {}", 2 * m)));
    }
    if *p <= Q::one() {
        return Err(Error::InvalidParams("p must exceed 1".into()));
    }
    let nq = qi(n);
    let g = qi(2 * m as i64) / (p - Q::one());
    let k0_m = match m {
        1 => &g * (&nq - qi(2) - &g),
        2 => &g * (&g + qi(2)) * (&nq - qi(2) - &g) * (&nq - qi(4) - &g),
        _ => &g * (&g + qi(2)) * (&g + qi(4)) * (&nq - qi(2) - &g) * (&nq - qi(4) - &g) * (&nq - qi(6) - &g),
    };
    let big_n = 2 * m as i64;
    let fact: i64 = (1..m as i64).product::<i64>().max(1);
    let mut prod = Q::one();
    for j in 0..m as i64 {
        prod *= qi(n - 2 * j);
    }
    let pow2 = if m >= 2 { qi(1 << (m - 2)) } else { q(1, 2) };
    let k0_hat_conjecture = pow2 * qi(fact) / qi(m as i64) * prod * qi((n - big_n) * (n - big_n));
    let k0_hat_theorem = match m {
        1 => q((n - 2) * (n - 2), 2),
        2 => q((n - 2) * (n - 4) * (n - 4), 2),
        _ => k0_hat(n),
    };
    Ok(OrderConstants { m, k0_m, k0_hat_conjecture, k0_hat_theorem })
}

//! Radial Pohozaev functionals (autonomous and nonautonomous), the
//! monotonicity identity checked symbolically and along trajectories, limit
//! levels and the coefficient sign audit.
//!
//! Values are per unit sphere measure.

use crate::appendix_tables::{eval_table, printed_laurent, TableId};
use crate::constants::{classify_regime, ell_star, k0_hat, Params, Regime};
use crate::cylinder_dynamics::{odd_power, State6, Trajectory};
use crate::error::{Error, Result};
use crate::hp::HpReal;
use crate::jet::JetPolynomial;
use crate::operator_algebra::emden_fowler_conjugate;
use crate::rat::{fmt_q, q, qi, sign, to_f64, Q};
use crate::report::{DiscrepancyEntry, DiscrepancyReport};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Printed autonomous `K₀..K₅` at `(n, p)`.
pub fn printed_k(params: &Params) -> [Q; 6] {
    std::array::from_fn(|i| eval_table(TableId::Autonomous, &format!("K{i}"), params.n(), params.p()).expect("p > 1"))
}

/// Engine-derived `K₀..K₅`, the coefficients of the dynamics.
pub fn derived_k(params: &Params) -> [Q; 6] {
    let set = emden_fowler_conjugate(params);
    std::array::from_fn(|i| set.k[i].coeff(0))
}

fn v(i: usize) -> JetPolynomial {
    JetPolynomial::var(i)
}

/// Printed radial density with coefficients `k`:
/// `(v₅v₁ - v₄v₂ + ½v₃²) + K₅(v₄v₁ - v₃v₂) + K₄(v₃v₁ - ½v₂²) + K₃v₂v₁ + ½K₂v₁² + ½K₀v² + F`.
pub fn h_rad_polynomial(k: &[Q; 6]) -> JetPolynomial {
    let half = q(1, 2);
    let top = v(5).mul(&v(1)).sub(&v(4).mul(&v(2))).add(&v(3).mul(&v(3)).scale(&half));
    let k5 = v(4).mul(&v(1)).sub(&v(3).mul(&v(2))).scale(&k[5]);
    let k4 = v(3).mul(&v(1)).sub(&v(2).mul(&v(2)).scale(&half)).scale(&k[4]);
    let k3 = v(2).mul(&v(1)).scale(&k[3]);
    let k2 = v(1).mul(&v(1)).scale(&(&k[2] * &half));
    let k0 = v(0).mul(&v(0)).scale(&(&k[0] * &half));
    top.add(&k5).add(&k4).add(&k3).add(&k2).add(&k0).add(&JetPolynomial::primitive())
}

/// Printed radial dissipation `-K₅v₃² + K₃v₂² - K₁v₁²`.
pub fn printed_rhs_polynomial(k: &[Q; 6]) -> JetPolynomial {
    v(3).mul(&v(3))
        .scale(&-k[5].clone())
        .add(&v(2).mul(&v(2)).scale(&k[3]))
        .add(&v(1).mul(&v(1)).scale(&-k[1].clone()))
}

fn primitive(v0: f64, p: f64) -> f64 {
    odd_power(v0, p) * v0 / (p + 1.0)
}

/// Printed `H_rad` with the printed autonomous coefficients.
pub fn h_rad_autonomous(params: &Params, s: &State6) -> f64 {
    let k: Vec<f64> = printed_k(params).iter().map(to_f64).collect();
    h_rad_with(&k, params.p_f64(), s)
}

fn h_rad_with(k: &[f64], p: f64, s: &State6) -> f64 {
    let [v0, v1, v2, v3, v4, v5] = s.0;
    (v5 * v1 - v4 * v2 + 0.5 * v3 * v3)
        + k[5] * (v4 * v1 - v3 * v2)
        + k[4] * (v3 * v1 - 0.5 * v2 * v2)
        + k[3] * v2 * v1
        + 0.5 * k[2] * v1 * v1
        + 0.5 * k[0] * v0 * v0
        + primitive(v0, p)
}

fn printed_rhs_with(k: &[f64], s: &State6) -> f64 {
    let [_, v1, v2, v3, ..] = s.0;
    -k[5] * v3 * v3 + k[3] * v2 * v2 - k[1] * v1 * v1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonotonicityIdentity {
    pub n: i64,
    pub p: String,
    /// `dH/dt` (ODE substituted) minus the printed right-hand side.
    pub residual: String,
    pub residual_is_zero: bool,
    /// Any `N` or `F` term left after substitution.
    pub leftover_nonlinear: bool,
    pub printed_rhs_identically_zero: bool,
    pub report: DiscrepancyReport,
    #[serde(skip)]
    pub residual_poly: JetPolynomial,
}

/// `d/dt H_rad` along the engine dynamics against the printed dissipation.
pub fn verify_monotonicity_identity_symbolic(params: &Params) -> Result<MonotonicityIdentity> {
    let kp = printed_k(params);
    let kd = derived_k(params);
    let dh = h_rad_polynomial(&kp).derivative()?.substitute_top(&kd);
    let rhs = printed_rhs_polynomial(&kp);
    let residual = dh.sub(&rhs);
    let mut report = DiscrepancyReport::default();
    let mut monos: Vec<[u8; 9]> = dh.terms().chain(rhs.terms()).map(|(m, _)| *m).collect();
    monos.sort();
    monos.dedup();
    for m in monos {
        let factors: Vec<(usize, u8)> = m.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, e)| (i, *e)).collect();
        let name = factors
            .iter()
            .map(|(i, e)| {
                let s = match i {
                    7 => "N".to_string(),
                    8 => "F".to_string(),
                    k => format!("v{k}"),
                };
                if *e > 1 { format!("{s}^{e}") } else { s }
            })
            .collect::<Vec<_>>()
            .join("*");
        report.entries.push(DiscrepancyEntry::exact(
            "monotonicity",
            &name,
            params.n(),
            &fmt_q(params.p()),
            &dh.coeff(&factors),
            &rhs.coeff(&factors),
        ));
    }
    report.canonicalize();
    Ok(MonotonicityIdentity {
        n: params.n(),
        p: fmt_q(params.p()),
        residual: residual.to_string(),
        residual_is_zero: residual.is_zero(),
        leftover_nonlinear: residual.has_nonlinear_terms(),
        printed_rhs_identically_zero: rhs.is_zero(),
        report,
        residual_poly: residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PohozaevSample {
    pub t: f64,
    pub value: f64,
    pub derivative_numeric: f64,
    pub derivative_formula: f64,
    /// Symbolic residual evaluated at the state.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonotonicityCheck {
    pub samples: Vec<PohozaevSample>,
    pub stencil_h: f64,
    /// `max |numeric - formula|`.
    pub max_mismatch: f64,
    /// `max |numeric - formula - residual|`.
    pub max_corrected_mismatch: f64,
    /// `max` of the corrected mismatch over `1 + maxⱼ|v⁽ʲ⁾|²`.
    pub max_scaled_corrected_mismatch: f64,
    pub positive: usize,
    pub negative: usize,
    pub flat: usize,
    /// `P` nonincreasing in increasing `t` on the sampled grid.
    pub nonincreasing: bool,
}

impl MonotonicityCheck {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "P", "dP_numeric", "dP_formula"])?;
        for s in &self.samples {
            wr.write_record([
                format!("{:.16e}", s.t),
                format!("{:.16e}", s.value),
                format!("{:.16e}", s.derivative_numeric),
                format!("{:.16e}", s.derivative_formula),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

const MIN_SAMPLES: usize = 8;
const FLAT: f64 = 1e-8;

/// Dual-path check of the monotonicity identity along `traj`: fourth-order
/// centred differences of `H_rad` against the printed dissipation, with and
/// without the symbolic residual.
pub fn monotonicity_check(params: &Params, traj: &Trajectory, samples: usize) -> Result<MonotonicityCheck> {
    let identity = verify_monotonicity_identity_symbolic(params)?;
    let kp: Vec<f64> = printed_k(params).iter().map(to_f64).collect();
    let p = params.p_f64();
    let (lo, hi) = traj.span();

    // stencil points: dense output if present, otherwise the grid itself
    let (ts, h, eval): (Vec<f64>, f64, Box<dyn Fn(f64) -> Result<State6>>) = if traj.has_dense_output() {
        let h = 1e-3f64.max((hi - lo) / 1e6);
        let count = samples.max(MIN_SAMPLES);
        let a = lo + 2.0 * h;
        let b = hi - 2.0 * h;
        if b <= a {
            return Err(Error::GridTooCoarse("span shorter than the stencil".into()));
        }
        let ts = (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect();
        (ts, h, Box::new(|t| traj.eval(t)))
    } else {
        let mut grid = traj.times.clone();
        grid.sort_by(f64::total_cmp);
        let pitch = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
        let uniform = grid.windows(2).all(|w| ((w[1] - w[0]) - pitch).abs() <= 1e-9 * pitch.abs().max(1.0));
        if !uniform {
            return Err(Error::GridTooCoarse("sampled trajectories need a uniform grid".into()));
        }
        let h = pitch.max(1e-3);
        let ts = grid[2..grid.len().saturating_sub(2)].to_vec();
        (ts, h, Box::new(|t| traj.eval(t)))
    };
    if ts.len() < MIN_SAMPLES {
        return Err(Error::GridTooCoarse(format!("{} samples, need {MIN_SAMPLES}", ts.len())));
    }

    let hval = |t: f64| -> Result<f64> { Ok(h_rad_with(&kp, p, &eval(t)?)) };
    let kd: Vec<f64> = derived_k(params).iter().map(to_f64).collect();
    let mut out = Vec::with_capacity(ts.len());
    let mut max_m = 0.0f64;
    let mut max_c = 0.0f64;
    let mut max_s = 0.0f64;
    let (mut pos, mut neg, mut flat) = (0, 0, 0);
    for &t in &ts {
        let s = eval(t)?;
        let d = (hval(t - 2.0 * h)? - 8.0 * hval(t - h)? + 8.0 * hval(t + h)? - hval(t + 2.0 * h)?) / (12.0 * h);
        let formula = printed_rhs_with(&kp, &s);
        let v6 = -(0..6).map(|j| kd[j] * s.0[j]).sum::<f64>() - odd_power(s.0[0], p);
        let jet = [s.0[0], s.0[1], s.0[2], s.0[3], s.0[4], s.0[5], v6];
        let res = identity.residual_poly.eval(&jet, odd_power(s.0[0], p), primitive(s.0[0], p));
        let scale = 1.0 + s.0.iter().fold(0.0f64, |m, x| m.max(x * x));
        max_m = max_m.max((d - formula).abs());
        max_c = max_c.max((d - formula - res).abs());
        max_s = max_s.max((d - formula - res).abs() / scale);
        if d > FLAT {
            pos += 1;
        } else if d < -FLAT {
            neg += 1;
        } else {
            flat += 1;
        }
        out.push(PohozaevSample { t, value: hval(t)?, derivative_numeric: d, derivative_formula: formula, residual: res });
    }
    Ok(MonotonicityCheck {
        samples: out,
        stencil_h: h,
        max_mismatch: max_m,
        max_corrected_mismatch: max_c,
        max_scaled_corrected_mismatch: max_s,
        positive: pos,
        negative: neg,
        flat,
        nonincreasing: pos == 0,
    })
}

/// Largest `|P(t) - P(t_first)|` on the trajectory grid.
pub fn conservation_drift(params: &Params, traj: &Trajectory) -> f64 {
    let k: Vec<f64> = printed_k(params).iter().map(to_f64).collect();
    let p = params.p_f64();
    let p0 = h_rad_with(&k, p, &traj.states[0]);
    traj.states.iter().map(|s| (h_rad_with(&k, p, s) - p0).abs()).fold(0.0, f64::max)
}

/// Printed nonautonomous radial density, `p = 2_#`, printed `K̃` values.
pub fn h_rad_nonautonomous(n: i64, t: f64, s: &State6) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::Pole { var: "t" });
    }
    let k: Vec<f64> = (0..6)
        .map(|i| printed_laurent(TableId::Nonautonomous, &format!("K{i}"), n).map(|l| l.eval_f64(t)))
        .collect::<Result<_>>()?;
    let [w0, w1, w2, w3, w4, w5] = s.0;
    let nf = n as f64;
    let sharp = nf / (nf - 6.0);
    Ok(t * (w5 * w1 - w4 * w2 + 0.5 * w3 * w3)
        + t * k[5] * (w4 * w1 - w3 * w2)
        + t * k[4] * (w3 * w1 - 0.5 * w2 * w2)
        + t * k[3] * w2 * w1
        + 0.5 * t * k[1] * w1 * w1
        + 0.5 * t * k[0] * w0 * w0
        + (nf - 6.0) / (2.0 * (nf - 3.0)) * w0.abs().powf(sharp + 1.0))
}

/// Constant-state probe of the nonautonomous functional at `w₀ = K̂₀^{(n-6)/6}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AvilesProbe {
    pub n: i64,
    pub w0: f64,
    pub t: f64,
    pub value: f64,
    /// `(n-6)/(2(n-3)) w₀^{2_#+1} + ½ lim(tK̃₀) w₀²`.
    pub limit_with_half_weight: f64,
    /// Same with `K̂₀ w₀²`, the unhalved form used for the limit.
    pub limit_unhalved: f64,
    /// `3/(2(n-3)) K̂₀^{(n-3)/3}`.
    pub stated_magnitude: f64,
    /// `lim t K̃₀` from the printed table.
    pub lim_t_k0: String,
}

pub fn aviles_probe(n: i64, t: f64) -> Result<AvilesProbe> {
    let kh = k0_hat(n);
    let w0 = HpReal::pow_q(&kh, &q(n - 6, 6))?.to_f64();
    let value = h_rad_nonautonomous(n, t, &State6::constant(w0))?;
    let lim = printed_laurent(TableId::Nonautonomous, "K0", n)?.coeff(-1);
    let nf = n as f64;
    let first = (nf - 6.0) / (2.0 * (nf - 3.0)) * w0.powf(nf / (nf - 6.0) + 1.0);
    Ok(AvilesProbe {
        n,
        w0,
        t,
        value,
        limit_with_half_weight: first + 0.5 * to_f64(&lim) * w0 * w0,
        limit_unhalved: first + to_f64(&kh) * w0 * w0,
        stated_magnitude: HpReal::pow_q(&kh, &q(n - 3, 3))?.mul_q(&q(3, 2 * (n - 3))).to_f64(),
        lim_t_k0: fmt_q(&lim),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelClass {
    Zero,
    MinusEllStar,
    /// Nonzero Aviles limit `w → K̂₀^{(n-6)/6}`.
    AvilesNonzero,
    Unresolved,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitLevel {
    pub class: LevelClass,
    pub terminal_t: f64,
    /// Terminal `P` (autonomous) or terminal `w` (Aviles).
    pub terminal_value: f64,
    /// Nonzero reference level: `-ℓ*ₚ` or `K̂₀^{(n-6)/6}`.
    pub reference: f64,
    pub distance_to_zero: f64,
    pub distance_to_nonzero: f64,
}

const LEVEL_TOL: f64 = 0.1;

fn classify(value: f64, reference: f64, nonzero: LevelClass) -> (LevelClass, f64, f64) {
    let scale = reference.abs();
    let dz = value.abs() / scale;
    let dn = (value - reference).abs() / scale;
    let class = if value == 0.0 {
        LevelClass::Zero
    } else if dz.min(dn) > LEVEL_TOL {
        LevelClass::Unresolved
    } else if dz < dn {
        LevelClass::Zero
    } else {
        nonzero
    };
    (class, dz, dn)
}

/// Terminal `P` of an autonomous trajectory against `{0, -ℓ*ₚ}`; for
/// Aviles trajectories (`p = 2_#`) the terminal `w` against `{0, K̂₀^{(n-6)/6}}`.
pub fn limit_level(params: &Params, traj: &Trajectory) -> Result<LimitLevel> {
    let last = *traj.states.last().ok_or_else(|| Error::GridTooCoarse("empty trajectory".into()))?;
    let t = traj.t_last();
    if classify_regime(params) == Regime::Aviles {
        let reference = HpReal::pow_q(&k0_hat(params.n()), &q(params.n() - 6, 6))?.to_f64();
        let (class, dz, dn) = classify(last.0[0], reference, LevelClass::AvilesNonzero);
        return Ok(LimitLevel { class, terminal_t: t, terminal_value: last.0[0], reference, distance_to_zero: dz, distance_to_nonzero: dn });
    }
    let reference = -ell_star(params)?.to_f64();
    let value = h_rad_autonomous(params, &last);
    let (class, dz, dn) = classify(value, reference, LevelClass::MinusEllStar);
    Ok(LimitLevel { class, terminal_t: t, terminal_value: value, reference, distance_to_zero: dz, distance_to_nonzero: dn })
}

/// Classification of a terminal Aviles value `w` on its own.
pub fn aviles_level_of(n: i64, w: f64) -> Result<LimitLevel> {
    let reference = HpReal::pow_q(&k0_hat(n), &q(n - 6, 6))?.to_f64();
    let (class, dz, dn) = classify(w, reference, LevelClass::AvilesNonzero);
    Ok(LimitLevel { class, terminal_t: f64::NEG_INFINITY, terminal_value: w, reference, distance_to_zero: dz, distance_to_nonzero: dn })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignEntry {
    pub name: String,
    pub value: String,
    pub sign: i8,
    /// Claimed relation, `">= 0"` or `"<= 0"`.
    pub claim: String,
    pub matches_claim: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignProfile {
    pub n: i64,
    pub p: String,
    pub regime: String,
    pub entries: Vec<SignEntry>,
}

impl SignProfile {
    pub fn all_match(&self) -> bool {
        self.entries.iter().all(|e| e.matches_claim)
    }
}

/// Exact signs of the printed `K₅, K₃, K₁, J₃, J₁, L₁` against the claimed
/// relations `K₅, K₁, L₁ ≥ 0` and `K₃, J₃, J₁ ≤ 0`.
pub fn sign_profile(params: &Params) -> Result<SignProfile> {
    let claims = [("K5", 1), ("K3", -1), ("K1", 1), ("J3", -1), ("J1", -1), ("L1", 1)];
    let mut entries = Vec::new();
    for (name, dir) in claims {
        let val = eval_table(TableId::Autonomous, name, params.n(), params.p())?;
        let s = sign(&val);
        entries.push(SignEntry {
            name: name.to_string(),
            value: fmt_q(&val),
            sign: s,
            claim: if dir > 0 { ">= 0".into() } else { "<= 0".into() },
            matches_claim: s == 0 || s == dir,
        });
    }
    Ok(SignProfile { n: params.n(), p: fmt_q(params.p()), regime: classify_regime(params).name().into(), entries })
}

/// `(K₀/2)c² + |c|^{p+1}/(p+1)` exactly for rational `c` when `p` is an integer.
pub fn constant_state_level(params: &Params, c: &Q) -> Option<Q> {
    if !params.p().is_integer() {
        return None;
    }
    let p: i32 = params.p().to_integer().try_into().ok()?;
    let k0 = &printed_k(params)[0];
    let pow = crate::rat::pow_i(c, p + 1);
    let abs = if pow < Q::zero() && (p + 1) % 2 == 1 { -pow } else { pow };
    Some(k0 * c * c / qi(2) + abs / Q::from_integer((p + 1).into()))
}

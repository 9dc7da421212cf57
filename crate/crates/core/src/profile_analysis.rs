//! Radial profiles `u(r)` on `(0,1)`: conversion from cylinder trajectories,
//! log-linear rate fits, the Kelvin transform about the unit sphere, the
//! leading balance of the critical log ansatz and the scaling check.
//!
//! Logs are taken as `L = -ln r > 0`.

use crate::constants::{k0_hat, lower_critical, Params};
use crate::cylinder_dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::hp::HpReal;
use crate::logpow::{apply, LogPowerExpr};
use crate::operator_algebra::tri_laplacian_polar;
use crate::rat::{fmt_q, q, qi, to_f64, Q};
use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    FromTrajectory,
    Ansatz,
    Kelvin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    /// Strictly decreasing, inside `(0,1)`.
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl RadialProfile {
    pub fn new(radii: Vec<f64>, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if radii.len() != values.len() {
            return Err(Error::Domain("radii and values differ in length".into()));
        }
        for (i, (&r, &u)) in radii.iter().zip(&values).enumerate() {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Domain(format!("radius {r} outside (0,1)")));
            }
            if i > 0 && r >= radii[i - 1] {
                return Err(Error::Domain("radii must be strictly decreasing".into()));
            }
            if !(u > 0.0) || !u.is_finite() {
                return Err(Error::NonPositive { r });
            }
        }
        Ok(RadialProfile { radii, values, provenance })
    }

    /// `count` radii equispaced in `ln r` from `r_max` down to `r_min`.
    pub fn from_fn(f: impl Fn(f64) -> f64, r_min: f64, r_max: f64, count: usize, provenance: Provenance) -> Result<Self> {
        if !(0.0 < r_min && r_min < r_max && r_max < 1.0) || count < 2 {
            return Err(Error::Domain(format!("bad grid [{r_min}, {r_max}] x {count}")));
        }
        let radii = log_grid(r_min, r_max, count);
        let values = radii.iter().map(|&r| f(r)).collect();
        Self::new(radii, values, provenance)
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        *self.radii.last().unwrap_or(&f64::NAN)
    }

    pub fn r_max(&self) -> f64 {
        *self.radii.first().unwrap_or(&f64::NAN)
    }

    /// Piecewise linear interpolation of `ln u` in `ln r`; exact on pure powers.
    pub fn interpolate(&self, r: f64) -> Result<f64> {
        let n = self.radii.len();
        if n < 2 || !(r >= self.r_min() && r <= self.r_max()) {
            return Err(Error::WindowExhausted(format!("r = {r} outside [{}, {}]", self.r_min(), self.r_max())));
        }
        // radii decreasing: find i with radii[i] >= r >= radii[i+1]
        let i = self.radii.partition_point(|&x| x > r).saturating_sub(1).min(n - 2);
        let (x0, x1) = (self.radii[i].ln(), self.radii[i + 1].ln());
        let (y0, y1) = (self.values[i].ln(), self.values[i + 1].ln());
        let s = (r.ln() - x0) / (x1 - x0);
        Ok((y0 + s * (y1 - y0)).exp())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["r", "u"])?;
        for (r, u) in self.radii.iter().zip(&self.values) {
            wr.write_record([format!("{r:.16e}"), format!("{u:.16e}")])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, provenance: Provenance) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let (mut radii, mut values) = (Vec::new(), Vec::new());
        for rec in rd.records() {
            let rec = rec?;
            let get = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Domain("short row".into()))?
                    .trim()
                    .parse()
                    .map_err(|e| Error::Domain(format!("bad number: {e}")))
            };
            radii.push(get(0)?);
            values.push(get(1)?);
        }
        Self::new(radii, values, provenance)
    }
}

fn log_grid(r_min: f64, r_max: f64, count: usize) -> Vec<f64> {
    let (a, b) = (r_max.ln(), r_min.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

fn profile_points(params: &Params, samples: impl Iterator<Item = (f64, f64)>) -> Result<RadialProfile> {
    let g = to_f64(&params.gamma());
    let mut pts: Vec<(f64, f64)> = samples.filter(|(t, _)| *t < 0.0).collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    let mut radii = Vec::with_capacity(pts.len());
    let mut values = Vec::with_capacity(pts.len());
    for (t, v) in pts {
        let r = t.exp();
        if !(v > 0.0) {
            return Err(Error::NonPositive { r });
        }
        if r <= 0.0 {
            break;
        }
        radii.push(r);
        values.push((-g * t).exp() * v);
    }
    RadialProfile::new(radii, values, Provenance::FromTrajectory)
}

/// `u(eᵗ) = e^{-γt} v(t)` on the trajectory grid, `t < 0` only.
pub fn profile_from_trajectory(params: &Params, traj: &Trajectory) -> Result<RadialProfile> {
    profile_points(params, traj.times.iter().copied().zip(traj.states.iter().map(|s| s.0[0])))
}

/// Same, sampled through dense output at `count` radii equispaced in `ln r`.
pub fn profile_from_trajectory_on(params: &Params, traj: &Trajectory, r_min: f64, r_max: f64, count: usize) -> Result<RadialProfile> {
    let ts: Vec<f64> = log_grid(r_min, r_max, count).iter().map(|r| r.ln()).collect();
    let states = traj.sample(&ts)?;
    profile_points(params, ts.into_iter().zip(states.into_iter().map(|s| s.0[0])))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    PurePower,
    PowerLog,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub exponent: f64,
    pub log_exponent: f64,
    pub constant: f64,
    pub residual_rms: f64,
    pub window: (f64, f64),
}

pub const DEFAULT_WINDOW: (f64, f64) = (1e-10, 1e-4);
pub const MIN_FIT_POINTS: usize = 16;

/// Least squares of `ln u` on `{1, ln r}` or `{1, ln r, ln L}`, over the
/// profile points inside `window`.
pub fn fit_rate(profile: &RadialProfile, window: (f64, f64), model: FitModel) -> Result<RateFit> {
    let (lo, hi) = window;
    if !(0.0 < lo && lo < hi) {
        return Err(Error::Domain(format!("bad window ({lo}, {hi})")));
    }
    if model == FitModel::PowerLog && hi >= (-1.0f64).exp() {
        return Err(Error::Domain("power-log fits need r < 1/e".into()));
    }
    let pts: Vec<(f64, f64)> = profile
        .radii
        .iter()
        .zip(&profile.values)
        .filter(|(r, _)| **r >= lo && **r <= hi)
        .map(|(r, u)| (*r, *u))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::GridTooCoarse(format!("{} points in window, need {MIN_FIT_POINTS}", pts.len())));
    }
    let cols = if model == FitModel::PowerLog { 3 } else { 2 };
    let a = DMatrix::from_fn(pts.len(), cols, |i, j| {
        let lr = pts[i].0.ln();
        match j {
            0 => 1.0,
            1 => lr,
            _ => (-lr).ln(),
        }
    });
    let b = DVector::from_iterator(pts.len(), pts.iter().map(|(_, u)| u.ln()));
    // column scaling keeps the singular value test meaningful
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut scaled = a.clone();
    for (j, nrm) in norms.iter().enumerate() {
        scaled.column_mut(j).unscale_mut(*nrm);
    }
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-10 * smax) {
        return Err(Error::RankDeficient);
    }
    let y = svd.solve(&b, 0.0).map_err(|e| Error::NoConvergence(e.to_string()))?;
    let coef: Vec<f64> = (0..cols).map(|j| y[j] / norms[j]).collect();
    let resid = &a * DVector::from_vec(coef.clone()) - &b;
    Ok(RateFit {
        exponent: coef[1],
        log_exponent: if cols == 3 { coef[2] } else { 0.0 },
        constant: coef[0].exp(),
        residual_rms: (resid.norm_squared() / pts.len() as f64).sqrt(),
        window,
    })
}

/// `u_μ(r) = (μ/r)^{n-6} u(μ²/r)` on the mapped grid points `μ²/rᵢ ∈ (0,1)`.
pub fn kelvin_transform(profile: &RadialProfile, mu: f64, n: i64) -> Result<RadialProfile> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Domain(format!("mu = {mu}")));
    }
    let e = (n - 6) as f64;
    let mut pairs: Vec<(f64, f64)> = profile
        .radii
        .iter()
        .zip(&profile.values)
        .filter_map(|(&r, &u)| {
            let img = mu * mu / r;
            (img > 0.0 && img < 1.0).then(|| (img, (mu / img).powf(e) * u))
        })
        .collect();
    if pairs.len() < 2 {
        return Err(Error::WindowExhausted(format!("mu = {mu} maps the profile outside (0,1)")));
    }
    pairs.reverse();
    let (radii, values) = pairs.into_iter().unzip();
    RadialProfile::new(radii, values, Provenance::Kelvin)
}

/// Kelvin transform evaluated at prescribed radii through interpolation.
pub fn kelvin_transform_on(profile: &RadialProfile, mu: f64, n: i64, radii: &[f64]) -> Result<RadialProfile> {
    let e = (n - 6) as f64;
    let values = radii
        .iter()
        .map(|&r| Ok((mu / r).powf(e) * profile.interpolate(mu * mu / r)?))
        .collect::<Result<Vec<_>>>()?;
    RadialProfile::new(radii.to_vec(), values, Provenance::Kelvin)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AvilesBalance {
    pub n: i64,
    /// `c(n)`: leading coefficient of `(-Δ)³(r^{6-n} L^{(6-n)/6})`.
    #[serde(with = "crate::rat::qser")]
    pub leading_coefficient: Q,
    /// Power and log exponent of that leading term.
    #[serde(with = "crate::rat::qser")]
    pub lhs_power: Q,
    #[serde(with = "crate::rat::qser")]
    pub lhs_log_exponent: Q,
    /// Same for `f(A r^{6-n} L^{(6-n)/6})`.
    #[serde(with = "crate::rat::qser")]
    pub rhs_power: Q,
    #[serde(with = "crate::rat::qser")]
    pub rhs_log_exponent: Q,
    /// The `r^{-n} L^{(6-n)/6}` coefficient, which must vanish.
    #[serde(with = "crate::rat::qser")]
    pub unshifted_coefficient: Q,
    /// `A = c(n)^{(n-6)/6}` written out.
    pub derived_constant: String,
    pub derived_value: f64,
    #[serde(with = "crate::rat::qser")]
    pub k0_hat: Q,
    pub k0_hat_value: f64,
    pub exponents_match: bool,
    pub matches_k0_hat: bool,
}

/// Leading-order balance of `(-Δ)³u = u^{2_#}` on `u = A r^{6-n} L^{(6-n)/6}`.
pub fn aviles_leading_balance(n: i64) -> Result<AvilesBalance> {
    if n < 7 {
        return Err(Error::InvalidParams(format!("n = {n} < 7")));
    }
    let b = q(6 - n, 6);
    let ansatz = LogPowerExpr::monomial(Q::one(), qi(6 - n), b.clone());
    let lhs = apply(&tri_laplacian_polar(n), &ansatz, &Q::zero())?.scale(&qi(-1));
    let (power, j, coeff) = lhs.leading_term().ok_or_else(|| Error::Domain("ansatz is annihilated".into()))?;
    let lhs_log = &b - qi(j as i64);
    let sharp = lower_critical(n);
    let rhs_power = qi(6 - n) * &sharp;
    let rhs_log = &b * &sharp;
    let exponents_match = power == rhs_power && lhs_log == rhs_log;
    let expo = q(n - 6, 6);
    let derived = if coeff > Q::zero() { HpReal::pow_q(&coeff, &expo)?.to_f64() } else { f64::NAN };
    let kh = k0_hat(n);
    Ok(AvilesBalance {
        n,
        unshifted_coefficient: lhs.coeff(&qi(-n), 0),
        lhs_power: power,
        lhs_log_exponent: lhs_log,
        rhs_power,
        rhs_log_exponent: rhs_log,
        derived_constant: format!("({})^({})", fmt_q(&coeff), fmt_q(&expo)),
        derived_value: derived,
        k0_hat_value: HpReal::pow_q(&kh, &expo)?.to_f64(),
        matches_k0_hat: coeff == kh && exponents_match,
        leading_coefficient: coeff,
        k0_hat: kh,
        exponents_match,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingReport {
    pub lambda: f64,
    pub points: usize,
    /// Max relative gap of `v̂(t)` against `v(t + ln λ)`, and of the first
    /// and second divided differences.
    pub max_value_gap: f64,
    pub max_first_difference_gap: f64,
    pub max_second_difference_gap: f64,
    /// Max relative `|û_λ(r) - u(r)|` on the common window (zero for pure powers).
    pub max_profile_change: Option<f64>,
    pub passes: bool,
}

const SCALING_TOL: f64 = 1e-12;

fn divided(ts: &[f64], vs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let d1: Vec<f64> = ts.windows(2).zip(vs.windows(2)).map(|(t, v)| (v[1] - v[0]) / (t[1] - t[0])).collect();
    let d2: Vec<f64> = ts.windows(3).zip(d1.windows(2)).map(|(t, d)| 2.0 * (d[1] - d[0]) / (t[2] - t[0])).collect();
    (d1, d2)
}

fn rel_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs() / (1.0 + x.abs().max(y.abs()))).fold(0.0, f64::max)
}

/// `û_λ(r) = λ^γ u(λr)` against `u` through their cylindrical images.
pub fn scaling_invariance_check(params: &Params, profile: &RadialProfile, lambda: f64) -> Result<ScalingReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda = {lambda}")));
    }
    let g = to_f64(&params.gamma());
    let ll = lambda.ln();
    // û at r = rᵢ/λ uses the grid value u(rᵢ)
    let mut t_hat = Vec::new();
    let mut v_hat = Vec::new();
    let mut v_ref = Vec::new();
    for (&r, &u) in profile.radii.iter().zip(&profile.values) {
        let rh = r / lambda;
        if !(rh > 0.0 && rh < 1.0) {
            continue;
        }
        let uh = lambda.powf(g) * u;
        let th = rh.ln();
        t_hat.push(th);
        v_hat.push((g * th).exp() * uh);
        // v(t + ln λ) at t + ln λ = ln r
        v_ref.push((g * r.ln()).exp() * u);
    }
    if t_hat.len() < 3 {
        return Err(Error::WindowExhausted(format!("lambda = {lambda} leaves fewer than 3 points")));
    }
    let t_ref: Vec<f64> = t_hat.iter().map(|t| t + ll).collect();
    let (h1, h2) = divided(&t_hat, &v_hat);
    let (r1, r2) = divided(&t_ref, &v_ref);
    let change = {
        let gaps: Vec<f64> = t_hat
            .iter()
            .zip(&v_hat)
            .filter_map(|(t, vh)| {
                let r = t.exp();
                let uh = vh * (-g * t).exp();
                profile.interpolate(r).ok().map(|u| (uh - u).abs() / u)
            })
            .collect();
        (!gaps.is_empty()).then(|| gaps.into_iter().fold(0.0, f64::max))
    };
    let vg = rel_gap(&v_hat, &v_ref);
    let g1 = rel_gap(&h1, &r1);
    let g2 = rel_gap(&h2, &r2);
    Ok(ScalingReport {
        lambda,
        points: t_hat.len(),
        max_value_gap: vg,
        max_first_difference_gap: g1,
        max_second_difference_gap: g2,
        max_profile_change: change,
        passes: vg <= SCALING_TOL && g1 <= 1e-8 && g2 <= 1e-6,
    })
}

/// `A r^{6-n} L^{(6-n)/6}` with `A = K̂₀^{(n-6)/6}`.
pub fn aviles_ansatz_profile(n: i64, r_min: f64, r_max: f64, count: usize) -> Result<RadialProfile> {
    let a = HpReal::pow_q(&k0_hat(n), &q(n - 6, 6))?.to_f64();
    let e = (6 - n) as f64;
    RadialProfile::from_fn(|r| a * r.powf(e) * (-r.ln()).powf(e / 6.0), r_min, r_max, count, Provenance::Ansatz)
}

/// `r^{6-n}(1 + r)`, a fundamental-solution dominated profile.
pub fn serrin_lions_probe_profile(n: i64, r_min: f64, r_max: f64, count: usize) -> Result<RadialProfile> {
    let e = (6 - n) as f64;
    RadialProfile::from_fn(|r| r.powf(e) * (1.0 + r), r_min, r_max, count, Provenance::Ansatz)
}

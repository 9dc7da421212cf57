//! Radial cylinder dynamics: the autonomous sixth-order ODE, its
//! logarithmically weighted nonautonomous counterpart at `p = 2_#`,
//! equilibria, linear spectra and an adaptive Dormand–Prince integrator.

use crate::constants::{classify_regime, k0_product, upper_critical, Params, Regime};
use crate::error::{Error, Result};
use crate::hp::HpReal;
use crate::operator_algebra::{
    emden_fowler_conjugate, nonautonomous_conjugate, symbol_poly, LogWeight, NONAUTONOMOUS_RHS_SIGN,
};
use crate::rat::{qi, to_f64, Q};
use nalgebra::{Complex, DMatrix};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// States beyond this magnitude abort the integration.
pub const BLOW_UP: f64 = 1e150;

/// Jet `(v, v', …, v⁽⁵⁾)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct State6(pub [f64; 6]);

impl State6 {
    pub fn new(jet: [f64; 6]) -> Result<Self> {
        if jet.iter().all(|x| x.is_finite()) {
            Ok(State6(jet))
        } else {
            Err(Error::NonFinite { t: f64::NAN })
        }
    }

    pub fn zero() -> Self {
        State6([0.0; 6])
    }

    pub fn constant(c: f64) -> Self {
        State6([c, 0.0, 0.0, 0.0, 0.0, 0.0])
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { rel_tol: 1e-10, abs_tol: 1e-12, max_step: 0.5, max_steps: 200_000 }
    }
}

impl IntegratorConfig {
    pub fn with_tol(rel_tol: f64, abs_tol: f64) -> Self {
        IntegratorConfig { rel_tol, abs_tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| (1e-14..=1e-2).contains(&x);
        if !ok(self.rel_tol) || !ok(self.abs_tol) {
            return Err(Error::InvalidParams(format!(
                "tolerances must lie in [1e-14, 1e-2], got rel {} abs {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if !(self.max_step > 0.0) || self.max_steps == 0 {
            return Err(Error::InvalidParams("max_step and max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// `sign(v)|v|ᵖ`, computed through logs for large `|v|`.
pub fn odd_power(v: f64, p: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let a = v.abs();
    let m = if a > 1e100 { (p * a.ln()).exp() } else { a.powf(p) };
    m.copysign(v)
}

/// `f(c + d) - f(c)` without cancellation when `|d| ≪ |c|`.
fn odd_power_increment(c: f64, d: f64, p: f64) -> f64 {
    if c != 0.0 && (d / c) > -0.5 {
        let r = d / c;
        odd_power(c, p) * (p * r.ln_1p()).exp_m1()
    } else {
        odd_power(c + d, p) - odd_power(c, p)
    }
}

/// Right-hand sides of the first-order systems `y' = F(t, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Field {
    /// `v⁽⁶⁾ = -Σ Kⱼ v⁽ʲ⁾ - |v|^{p-1}v`. With `center ≠ 0` the state holds the
    /// deviation `v - center`, where `center` must be an equilibrium.
    Autonomous { n: i64, p: String, k: [f64; 6], pf: f64, center: f64 },
    /// `w⁽⁶⁾ = -Σ K̃ⱼ(t) w⁽ʲ⁾ + σ t⁻¹ |w|^{2_#-1}w`, coefficients as Laurent terms in `t`.
    Nonautonomous { n: i64, k: Vec<Vec<(i32, f64)>>, pf: f64, sign: f64 },
    /// Linear part of the autonomous system only.
    Linear { n: i64, p: String, k: [f64; 6] },
}

impl Field {
    pub fn autonomous(params: &Params) -> Self {
        Field::Autonomous {
            n: params.n(),
            p: crate::rat::fmt_q(params.p()),
            k: emden_fowler_conjugate(params).k_f64(),
            pf: params.p_f64(),
            center: 0.0,
        }
    }

    /// Deviation form about an equilibrium `center`.
    pub fn autonomous_about(params: &Params, center: f64) -> Self {
        match Self::autonomous(params) {
            Field::Autonomous { n, p, k, pf, .. } => Field::Autonomous { n, p, k, pf, center },
            _ => unreachable!(),
        }
    }

    pub fn linear(params: &Params) -> Self {
        Field::Linear { n: params.n(), p: crate::rat::fmt_q(params.p()), k: emden_fowler_conjugate(params).k_f64() }
    }

    /// Nonautonomous field at `p = 2_#`, engine-derived coefficients.
    pub fn nonautonomous(n: i64) -> Self {
        let set = nonautonomous_conjugate(n, LogWeight::Bounded);
        let k = set.k.iter().map(|c| c.terms().map(|(e, v)| (e, to_f64(v))).collect()).collect();
        Field::Nonautonomous {
            n,
            k,
            pf: n as f64 / (n as f64 - 6.0),
            sign: NONAUTONOMOUS_RHS_SIGN as f64,
        }
    }

    pub fn is_singular_at_zero(&self) -> bool {
        matches!(self, Field::Nonautonomous { .. })
    }

    /// Offset added to stored states to recover absolute coordinates.
    pub fn offset(&self) -> [f64; 6] {
        match self {
            Field::Autonomous { center, .. } => [*center, 0.0, 0.0, 0.0, 0.0, 0.0],
            _ => [0.0; 6],
        }
    }

    /// Stable textual identity, used for cache keys.
    pub fn descriptor(&self) -> String {
        match self {
            Field::Autonomous { n, p, center, .. } => format!("autonomous(n={n},p={p},center={center:e})"),
            Field::Nonautonomous { n, .. } => format!("nonautonomous(n={n})"),
            Field::Linear { n, p, .. } => format!("linear(n={n},p={p})"),
        }
    }

    pub fn eval(&self, t: f64, y: &[f64; 6]) -> Result<[f64; 6]> {
        let mut out = [y[1], y[2], y[3], y[4], y[5], 0.0];
        match self {
            Field::Autonomous { k, pf, center, .. } => {
                let lin: f64 = (0..6).map(|j| k[j] * y[j]).sum();
                let nl = if *center == 0.0 { odd_power(y[0], *pf) } else { odd_power_increment(*center, y[0], *pf) };
                out[5] = -lin - nl;
            }
            Field::Linear { k, .. } => {
                out[5] = -(0..6).map(|j| k[j] * y[j]).sum::<f64>();
            }
            Field::Nonautonomous { k, pf, sign, .. } => {
                if t == 0.0 {
                    return Err(Error::Pole { var: "t" });
                }
                let mut lin = 0.0;
                for (j, terms) in k.iter().enumerate() {
                    let c: f64 = terms.iter().map(|(e, v)| v * t.powi(*e)).sum();
                    lin += c * y[j];
                }
                out[5] = -lin + sign * odd_power(y[0], *pf) / t;
            }
        }
        Ok(out)
    }
}

/// Top component of the autonomous field, `v⁽⁶⁾`.
pub fn rhs_autonomous(params: &Params, s: &State6) -> [f64; 6] {
    Field::autonomous(params).eval(0.0, &s.0).expect("autonomous field has no poles")
}

pub fn rhs_nonautonomous(n: i64, t: f64, s: &State6) -> Result<[f64; 6]> {
    Field::nonautonomous(n).eval(t, &s.0)
}

// ---- Dormand–Prince 5(4) ------------------------------------------------

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Dense-output coefficients of one accepted step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t0: f64,
    pub h: f64,
    pub r: [[f64; 6]; 5],
}

impl Segment {
    fn lo(&self) -> f64 {
        self.t0.min(self.t0 + self.h)
    }
    fn hi(&self) -> f64 {
        self.t0.max(self.t0 + self.h)
    }

    fn eval(&self, t: f64) -> [f64; 6] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.r;
        let mut y = [0.0; 6];
        for i in 0..6 {
            y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        y
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

/// Extra record attached by [`shoot_to_equilibrium`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotInfo {
    pub equilibrium: f64,
    pub mode: Complex<f64>,
    pub amplitude_requested: f64,
    pub amplitude_used: f64,
    pub retries: usize,
    pub terminal_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State6>,
    pub increasing: bool,
    pub field: String,
    pub stats: IntegratorStats,
    pub shot: Option<ShotInfo>,
    offset: [f64; 6],
    /// Sorted by lower end.
    segments: Vec<Segment>,
}

impl Trajectory {
    /// A trajectory holding only grid values; `eval` falls back to the grid.
    pub fn from_samples(times: Vec<f64>, states: Vec<State6>, field: &str) -> Result<Self> {
        if times.len() != states.len() || times.len() < 2 {
            return Err(Error::InvalidParams("need matching times/states, at least two".into()));
        }
        let inc = times[1] > times[0];
        if !times.windows(2).all(|w| if inc { w[1] > w[0] } else { w[1] < w[0] }) {
            return Err(Error::InvalidParams("times must be strictly monotone".into()));
        }
        Ok(Trajectory {
            times,
            states,
            increasing: inc,
            field: field.into(),
            stats: IntegratorStats::default(),
            shot: None,
            offset: [0.0; 6],
            segments: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_first(&self) -> f64 {
        self.times[0]
    }

    pub fn t_last(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn span(&self) -> (f64, f64) {
        let (a, b) = (self.t_first(), self.t_last());
        (a.min(b), a.max(b))
    }

    pub fn has_dense_output(&self) -> bool {
        !self.segments.is_empty()
    }

    /// Dense-output state at `t` within the span.
    pub fn eval(&self, t: f64) -> Result<State6> {
        let (lo, hi) = self.span();
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if t < lo - slack || t > hi + slack {
            return Err(Error::Domain(format!("t = {t} outside [{lo}, {hi}]")));
        }
        if self.segments.is_empty() {
            return self.eval_linear(t);
        }
        let i = self.segments.partition_point(|s| s.hi() < t).min(self.segments.len() - 1);
        let mut y = self.segments[i].eval(t);
        for (a, o) in y.iter_mut().zip(self.offset) {
            *a += o;
        }
        Ok(State6(y))
    }

    fn eval_linear(&self, t: f64) -> Result<State6> {
        let (ts, ss): (Vec<f64>, Vec<&State6>) = if self.increasing {
            (self.times.clone(), self.states.iter().collect())
        } else {
            (self.times.iter().rev().copied().collect(), self.states.iter().rev().collect())
        };
        let i = ts.partition_point(|x| *x < t).clamp(1, ts.len() - 1);
        let w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
        let mut y = [0.0; 6];
        for (k, v) in y.iter_mut().enumerate() {
            *v = ss[i - 1].0[k] * (1.0 - w) + ss[i].0[k] * w;
        }
        Ok(State6(y))
    }

    pub fn sample(&self, ts: &[f64]) -> Result<Vec<State6>> {
        ts.iter().map(|t| self.eval(*t)).collect()
    }

    /// Same trajectory on a new grid (dense output kept).
    pub fn resampled(&self, ts: &[f64]) -> Result<Trajectory> {
        let states = self.sample(ts)?;
        let mut out = Trajectory::from_samples(ts.to_vec(), states, &self.field)?;
        out.stats = self.stats.clone();
        out.shot = self.shot.clone();
        out.offset = self.offset;
        out.segments = self.segments.clone();
        Ok(out)
    }

    /// Uniform grid of `count` points from first to last time.
    pub fn uniform_grid(&self, count: usize) -> Vec<f64> {
        let (a, b) = (self.t_first(), self.t_last());
        (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect()
    }

    pub fn reversed(mut self) -> Trajectory {
        self.times.reverse();
        self.states.reverse();
        self.increasing = !self.increasing;
        self
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "v", "v1", "v2", "v3", "v4", "v5"])?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut rec = vec![format!("{t:.16e}")];
            rec.extend(s.0.iter().map(|x| format!("{x:.16e}")));
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Trajectory> {
        let mut rd = csv::Reader::from_reader(r);
        let mut times = Vec::new();
        let mut states = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Domain(format!("bad number {s}: {e}"))))
                .collect::<Result<_>>()?;
            if vals.len() != 7 {
                return Err(Error::Domain("expected 7 columns".into()));
            }
            times.push(vals[0]);
            states.push(State6::new([vals[1], vals[2], vals[3], vals[4], vals[5], vals[6]])?);
        }
        Trajectory::from_samples(times, states, "csv")
    }
}

fn err_norm(y0: &[f64; 6], y1: &[f64; 6], e: &[f64; 6], cfg: &IntegratorConfig) -> f64 {
    let mut s = 0.0;
    for i in 0..6 {
        let sc = cfg.abs_tol + cfg.rel_tol * y0[i].abs().max(y1[i].abs());
        s += (e[i] / sc).powi(2);
    }
    (s / 6.0).sqrt()
}

fn axpy(y: &[f64; 6], h: f64, terms: &[(f64, &[f64; 6])]) -> [f64; 6] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..6 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Adaptive DOPRI5(4) from `t0` to `t1` (either direction). States in the
/// result are in absolute coordinates (the field's offset is added back).
pub fn integrate(field: &Field, t0: f64, s0: State6, t1: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if t0 == t1 || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidParams("need finite t0 != t1".into()));
    }
    if field.is_singular_at_zero() && t0.min(t1) <= 0.0 && t0.max(t1) >= 0.0 {
        return Err(Error::Pole { var: "t" });
    }
    let offset = field.offset();
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut stats = IntegratorStats { rel_tol: cfg.rel_tol, abs_tol: cfg.abs_tol, ..Default::default() };

    let mut t = t0;
    let mut y = s0.0;
    let mut k1 = field.eval(t, &y)?;
    stats.evaluations += 1;

    // initial step, Hairer–Wanner heuristic
    let sc = |y: &[f64; 6], i: usize| cfg.abs_tol + cfg.rel_tol * y[i].abs();
    let d0 = (0..6).map(|i| (y[i] / sc(&y, i)).powi(2)).sum::<f64>().sqrt() / 6f64.sqrt();
    let d1 = (0..6).map(|i| (k1[i] / sc(&y, i)).powi(2)).sum::<f64>().sqrt() / 6f64.sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(cfg.max_step).min(span);
    {
        let y1 = axpy(&y, dir * h, &[(1.0, &k1)]);
        let f1 = field.eval(t + dir * h, &y1)?;
        stats.evaluations += 1;
        let d2 = (0..6).map(|i| ((f1[i] - k1[i]) / sc(&y, i)).powi(2)).sum::<f64>().sqrt() / 6f64.sqrt() / h;
        let h1 = if d1.max(d2) <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        h = (100.0 * h).min(h1).min(cfg.max_step).min(span);
    }

    let mut times = vec![t0];
    let mut states = vec![State6(std::array::from_fn(|i| y[i] + offset[i]))];
    let mut segments = Vec::new();
    let mut last_rejected = false;

    while (t1 - t) * dir > 0.0 {
        if stats.steps + stats.rejected >= cfg.max_steps {
            return Err(Error::MaxSteps(cfg.max_steps));
        }
        let remaining = (t1 - t).abs();
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        } else if h > 0.5 * remaining && h < remaining {
            // avoid a sliver at the end
            h = 0.5 * remaining;
        }
        if h < 1e-14 * (1.0 + t.abs()) {
            return Err(Error::StepUnderflow { t });
        }
        let hs = dir * h;
        let k2 = field.eval(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
        let k3 = field.eval(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = field.eval(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = field.eval(t + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = field.eval(t + hs, &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        let y1 = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let tn = if last { t1 } else { t + hs };
        let k7 = field.eval(tn, &y1)?;
        stats.evaluations += 6;

        let mut e = [0.0; 6];
        for i in 0..6 {
            e[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err = err_norm(&y, &y1, &e, cfg);
        if !err.is_finite() || y1.iter().any(|v| !v.is_finite()) {
            if h < 1e-12 {
                return Err(Error::NonFinite { t });
            }
            h *= 0.2;
            stats.rejected += 1;
            last_rejected = true;
            continue;
        }
        if err <= 1.0 {
            let mut r = [[0.0; 6]; 5];
            for i in 0..6 {
                let dy = y1[i] - y[i];
                r[0][i] = y[i];
                r[1][i] = dy;
                r[2][i] = hs * k1[i] - dy;
                r[3][i] = dy - hs * k7[i] - r[2][i];
                r[4][i] = hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            segments.push(Segment { t0: t, h: tn - t, r });
            t = tn;
            y = y1;
            k1 = k7;
            stats.steps += 1;
            let abs: [f64; 6] = std::array::from_fn(|i| y[i] + offset[i]);
            if abs.iter().any(|v| v.abs() > BLOW_UP) {
                return Err(Error::BlowUp { t });
            }
            times.push(t);
            states.push(State6(abs));
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h * fac.clamp(0.2, 10.0)).min(cfg.max_step);
            last_rejected = false;
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            stats.rejected += 1;
            last_rejected = true;
        }
    }

    segments.sort_by(|a, b| a.lo().total_cmp(&b.lo()));
    Ok(Trajectory { times, states, increasing: dir > 0.0, field: field.descriptor(), stats, shot: None, offset, segments })
}

// ---- equilibria and spectra ---------------------------------------------

/// Constant solutions: `{0}` up to `2_#`, plus `K₀^{1/(p-1)}` above it.
pub fn equilibria(params: &Params) -> Result<Vec<f64>> {
    Ok(equilibria_hp(params)?.iter().map(HpReal::to_f64).collect())
}

pub fn equilibria_hp(params: &Params) -> Result<Vec<HpReal>> {
    if *params.p() > upper_critical(params.n()) - Q::one() {
        return Err(Error::InvalidParams("equilibria are tabulated for p <= 2^# - 1".into()));
    }
    let k0 = k0_product(params);
    let mut out = vec![HpReal::zero()];
    if k0.is_positive() {
        let e = Q::one() / (params.p() - Q::one());
        out.push(HpReal::pow_q(&k0, &e)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Ascending coefficients of the (monic) characteristic polynomial.
    pub poly: Vec<f64>,
    /// Sorted by decreasing real part, then decreasing imaginary part.
    pub roots: Vec<Complex<f64>>,
    pub residuals: Vec<f64>,
}

impl Spectrum {
    /// Roots with positive real part (decaying as `t → -∞`), one per
    /// conjugate pair, fastest first.
    pub fn stable_modes(&self) -> Vec<Complex<f64>> {
        self.roots.iter().filter(|z| z.re > 1e-9 && z.im >= -1e-12).copied().collect()
    }
}

fn horner(c: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + Complex::new(*a, 0.0);
    }
    (p, dp)
}

/// Simultaneous Aberth-Ehrlich iteration from points on a circle enclosing the roots.
fn aberth(c: &[f64]) -> Vec<Complex<f64>> {
    let d = c.len() - 1;
    let radius = 1.0 + c[..d].iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let mut z: Vec<Complex<f64>> = (0..d)
        .map(|k| Complex::from_polar(radius, 0.4 + std::f64::consts::TAU * k as f64 / d as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = horner(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex<f64> = (0..d).filter(|j| *j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Roots of a monic polynomial (ascending coefficients) through companion
/// eigenvalues and Newton polishing, with residual certification.
pub fn certified_roots(c: &[f64]) -> Result<(Vec<Complex<f64>>, Vec<f64>)> {
    let d = c.len() - 1;
    assert!((c[d] - 1.0).abs() < 1e-15, "monic polynomial expected");
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 0..d - 1 {
        m[(i, i + 1)] = 1.0;
    }
    for j in 0..d {
        m[(d - 1, j)] = -c[j];
    }
    // the unbounded Schur iteration can cycle on symmetric spectra
    let ev: Vec<Complex<f64>> = match m.try_schur(f64::EPSILON, 10_000) {
        Some(s) => s.complex_eigenvalues().iter().copied().collect(),
        None => aberth(c),
    };
    let mut roots = Vec::with_capacity(d);
    let mut residuals = Vec::with_capacity(d);
    for z0 in ev.iter() {
        let mut z = *z0;
        let mut best = horner(c, z).0.norm();
        for _ in 0..8 {
            let (p, dp) = horner(c, z);
            if dp.norm() == 0.0 {
                break;
            }
            let zn = z - p / dp;
            let r = horner(c, zn).0.norm();
            if r < best {
                z = zn;
                best = r;
            } else {
                break;
            }
        }
        if z.im.abs() < 1e-12 * (1.0 + z.re.abs()) {
            z.im = 0.0;
            best = horner(c, z).0.norm();
        }
        if best > 1e-8 * (1.0 + z.norm()).powi(d as i32) {
            return Err(Error::RootResidual(best));
        }
        roots.push(z);
        residuals.push(best);
    }
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|a, b| roots[*b].re.total_cmp(&roots[*a].re).then(roots[*b].im.total_cmp(&roots[*a].im)));
    Ok((idx.iter().map(|i| roots[*i]).collect(), idx.iter().map(|i| residuals[*i]).collect()))
}

/// Exact characteristic polynomial of the linearisation about a constant
/// state: `q(λ) + p|v*|^{p-1}`. At the nonzero equilibrium `|v*|^{p-1} = K₀`
/// exactly, so the polynomial stays rational.
pub fn linearized_poly(params: &Params, at_nonzero_equilibrium: bool) -> Vec<Q> {
    let mut c = symbol_poly(&emden_fowler_conjugate(params)).expect("autonomous").coeffs;
    if at_nonzero_equilibrium {
        c[0] += params.p() * k0_product(params);
    }
    c
}

pub fn stability_spectrum(params: &Params, equilibrium: f64) -> Result<Spectrum> {
    let eq = equilibria(params)?;
    let which = eq
        .iter()
        .position(|e| (e - equilibrium).abs() <= 1e-9 * (1.0 + e.abs()))
        .ok_or_else(|| Error::InvalidParams(format!("{equilibrium} is not an equilibrium")))?;
    let poly: Vec<f64> = linearized_poly(params, which == 1).iter().map(to_f64).collect();
    let (roots, residuals) = certified_roots(&poly)?;
    Ok(Spectrum { poly, roots, residuals })
}

// ---- shooting ------------------------------------------------------------

/// Perturbation along one stable mode (index into
/// [`Spectrum::stable_modes`]), scaled so its linear prediction at the start
/// of the trajectory is `amplitude · Re(e^{iφ} ξ)` with `ξ = (1, λ, …, λ⁵)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub amplitude: f64,
    pub mode: usize,
    pub phase: f64,
}

impl Default for Seed {
    fn default() -> Self {
        Seed { amplitude: 1e-3, mode: 0, phase: 0.0 }
    }
}

const SHOOT_RETRIES: usize = 20;
const TERMINAL_DISTANCE: f64 = 1e-6;

/// Trajectory on the set of solutions converging to the nonzero equilibrium
/// as `t → -∞`, returned on `t ∈ [-horizon, 0]` in decreasing `t`.
///
/// Integrating toward `-∞` directly amplifies roundoff along the modes with
/// negative real part. Instead the deviation from `v*` is integrated in
/// increasing `t` from `-horizon`, started on the chosen mode; deviation
/// coordinates keep the tiny initial data representable.
pub fn shoot_to_equilibrium(params: &Params, seed: &Seed, horizon: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    match classify_regime(params) {
        Regime::GidasSpruck | Regime::UpperCritical => {}
        r => return Err(Error::InvalidParams(format!("shooting needs a nonzero equilibrium, regime is {}", r.name()))),
    }
    if !(horizon > 0.0) {
        return Err(Error::InvalidParams("horizon must be positive".into()));
    }
    let eqs = equilibria(params)?;
    let vstar = *eqs.last().unwrap();
    let spec = stability_spectrum(params, vstar)?;
    let modes = spec.stable_modes();
    let lam = *modes
        .get(seed.mode)
        .ok_or_else(|| Error::InvalidParams(format!("mode {} of {} stable modes", seed.mode, modes.len())))?;
    let field = Field::autonomous_about(params, vstar);

    let mut amp = seed.amplitude;
    for retry in 0..=SHOOT_RETRIES {
        let c = Complex::from_polar(amp, seed.phase) * (-lam * horizon).exp();
        let mut d0 = [0.0; 6];
        let mut pw = Complex::new(1.0, 0.0);
        for v in d0.iter_mut() {
            *v = (c * pw).re;
            pw *= lam;
        }
        match integrate(&field, -horizon, State6(d0), 0.0, cfg) {
            Ok(traj) => {
                let terminal = State6(d0).norm_inf();
                if terminal <= TERMINAL_DISTANCE {
                    let mut traj = traj.reversed();
                    traj.shot = Some(ShotInfo {
                        equilibrium: vstar,
                        mode: lam,
                        amplitude_requested: seed.amplitude,
                        amplitude_used: amp,
                        retries: retry,
                        terminal_distance: terminal,
                    });
                    return Ok(traj);
                }
            }
            Err(Error::BlowUp { .. } | Error::NonFinite { .. } | Error::StepUnderflow { .. } | Error::MaxSteps(_)) => {}
            Err(e) => return Err(e),
        }
        amp *= 0.5;
    }
    Err(Error::NoConvergence(format!("no capture after {SHOOT_RETRIES} amplitude halvings")))
}

/// Scalar map `c ↦ -K₀c - |c|^{p-1}c` whose zeros are the constant solutions.
pub fn constant_state_map(params: &Params, c: f64) -> f64 {
    // derived K₀ is -K₀ product, which is cheap to evaluate
    let k0 = -to_f64(&k0_product(params));
    -k0 * c - odd_power(c, params.p_f64())
}

/// `q(λ)` for the derived symbol, exact.
pub fn symbol_value(params: &Params, lambda: &Q) -> Q {
    let c = linearized_poly(params, false);
    c.iter().rev().fold(Q::zero(), |acc, a| acc * lambda + a)
}

pub fn default_params() -> Params {
    Params::new(9, qi(4)).expect("valid")
}

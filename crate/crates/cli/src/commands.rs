use crate::cache::{content_hash, Cache};
use crate::config::{config_error, params_of, Probe, RunConfig};
use crate::report::{Check, RunReport};
use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;
use singlab_core::appendix_tables::{
    default_n_samples, default_p_samples, default_t_samples, large_t_samples, verify_all, verify_autonomous,
    verify_critical, verify_nonautonomous, verify_pohozaev_expansions, verify_polar, TableId, KNOWN_DISCREPANCIES,
};
use singlab_core::constants::{aviles_level_candidates, classify_regime, ell_star, k0_hat, k0_product, NamedConstants};
use singlab_core::cylinder_dynamics::{
    certified_roots, constant_state_map, equilibria, equilibria_hp, integrate, rhs_nonautonomous, shoot_to_equilibrium,
    stability_spectrum, Field, IntegratorConfig, State6, Trajectory,
};
use singlab_core::hp::HpReal;
use singlab_core::operator_algebra::{emden_fowler_conjugate, symbol_poly};
use singlab_core::pohozaev_lab::{
    aviles_level_of, aviles_probe, conservation_drift, h_rad_autonomous, h_rad_nonautonomous, limit_level,
    monotonicity_check, sign_profile, verify_monotonicity_identity_symbolic, LevelClass,
};
use singlab_core::profile_analysis::{
    aviles_ansatz_profile, aviles_leading_balance, fit_rate, profile_from_trajectory_on, serrin_lions_probe_profile,
    FitModel, RadialProfile, DEFAULT_WINDOW,
};
use singlab_core::rat::{fmt_q, q, to_f64};
use singlab_core::{DiscrepancyEntry, Params, Regime};
use std::path::Path;

/// Where artifacts go; `None` inside sweep cells.
pub struct Ctx<'a> {
    pub cache: &'a Cache,
    pub out: Option<&'a Path>,
}

impl Ctx<'_> {
    fn artifact(&self, report: &mut RunReport, name: &str, write: impl FnOnce(std::fs::File) -> Result<()>) -> Result<()> {
        if let Some(dir) = self.out {
            std::fs::create_dir_all(dir)?;
            let f = std::fs::File::create(dir.join(name)).with_context(|| format!("creating {name}"))?;
            write(f)?;
            report.artifacts.push(name.into());
        }
        Ok(())
    }
}

pub fn run(cfg: &RunConfig, ctx: &Ctx) -> Result<RunReport> {
    match cfg.experiment.as_str() {
        "verify-coefficients" => cmd_verify_coefficients(cfg, ctx),
        "symbol-roots" => cmd_symbol_roots(cfg, ctx),
        "equilibrium" => cmd_equilibrium(cfg, ctx),
        "pohozaev" => cmd_pohozaev(cfg, ctx),
        "rate-fit" => cmd_rate_fit(cfg, ctx),
        "aviles-balance" => cmd_aviles_balance(cfg, ctx),
        "sign-profile" => cmd_sign_profile(cfg, ctx),
        "sweep" => crate::sweep::cmd_sweep(cfg, ctx),
        other => Err(config_error(anyhow!("unknown experiment {other:?}"))),
    }
}

fn shoot_cached(ctx: &Ctx, params: &Params, cfg: &RunConfig, ic: &IntegratorConfig) -> Result<Trajectory> {
    let seed = cfg.seed.seed();
    let key = content_hash(&[
        singlab_core::VERSION,
        &Field::autonomous(params).descriptor(),
        &serde_json::to_string(&seed)?,
        &format!("{:e}", cfg.horizon),
        &serde_json::to_string(ic)?,
    ]);
    ctx.cache.get_or_compute("trajectory", &key, || {
        shoot_to_equilibrium(params, &seed, cfg.horizon, ic).map_err(|e| anyhow!("shooting failed: {e}"))
    })
}

fn require_regime(params: &Params, allowed: &[Regime]) -> Result<Regime> {
    let r = classify_regime(params);
    if !allowed.contains(&r) {
        let names: Vec<&str> = allowed.iter().map(|r| r.name()).collect();
        bail!(config_error(anyhow!("({}, {}) is in the {} regime; this command needs {names:?}", params.n(), fmt_q(params.p()), r.name())));
    }
    Ok(r)
}

// ---- verify-coefficients ---------------------------------------------------

fn cmd_verify_coefficients(cfg: &RunConfig, ctx: &Ctx) -> Result<RunReport> {
    let mut report = RunReport::new(cfg);
    if let (Some(table), Some(entry)) = (&cfg.table, &cfg.entry) {
        let entries = single_entry(cfg, table, entry)?;
        for e in &entries {
            report.check(Check::new(
                &format!("{}/{}", e.table, e.entry),
                e.severity.is_match(),
                format!("n={} {}={}: {} (derived {}, printed {})", e.n, TableId::parse(table).map(|t| t.variable()).unwrap_or("x"), e.p_or_t, e.severity.name(), e.derived, e.printed),
            ));
        }
        report.discrepancies = entries.iter().filter(|e| !e.severity.is_match()).cloned().collect();
        report.data = json!({ "entries": entries });
        return Ok(report);
    }
    if cfg.table.is_some() != cfg.entry.is_some() {
        bail!(config_error(anyhow!("single-entry mode needs both --table and --entry")));
    }
    let ns = if cfg.n_list.is_empty() { default_n_samples() } else { cfg.n_list.clone() };
    let ps = if cfg.p_list.is_empty() { default_p_samples() } else { cfg.p_values()? };
    let ts = if cfg.t_list.is_empty() { default_t_samples() } else { cfg.t_values()? };
    let r = verify_all(&ns, &ps, &ts).map_err(config_error)?;
    for v in &r.verdicts {
        report.check(Check::new(
            &format!("{}/{}", v.table, v.entry),
            v.verdict.is_match(),
            format!("{} ({} mismatches over {} samples)", v.verdict.name(), v.mismatches, v.samples),
        ));
    }
    for d in &r.decay_checks {
        report.check(Check::new(&format!("decay/{}/n={}", d.entry, d.n), d.consistent, d.note.clone()));
    }
    let undocumented: Vec<(String, String)> = r
        .discrepant_entries()
        .into_iter()
        .filter(|(t, e)| !KNOWN_DISCREPANCIES.contains(&(t.as_str(), e.as_str())))
        .collect();
    report.discrepancies = r.mismatches().cloned().collect();
    report.data = json!({
        "verdicts": r.verdicts,
        "decay_checks": r.decay_checks,
        "discrepant_entries": r.discrepant_entries(),
        "undocumented_discrepancies": undocumented,
    });
    let summary = summary_text(&report);
    ctx.artifact(&mut report, "summary.txt", |mut f| {
        use std::io::Write;
        f.write_all(summary.as_bytes())?;
        Ok(())
    })?;
    Ok(report)
}

fn summary_text(report: &RunReport) -> String {
    let mut s = String::new();
    let bad: Vec<&Check> = report.checks.iter().filter(|c| !c.passed).collect();
    s.push_str(&format!("{} checks, {} discrepant\n", report.checks.len(), bad.len()));
    for c in bad {
        s.push_str(&format!("  {}: {}\n", c.name, c.detail));
    }
    s
}

fn single_entry(cfg: &RunConfig, table: &str, entry: &str) -> Result<Vec<DiscrepancyEntry>> {
    let id = TableId::parse(table).ok_or_else(|| config_error(anyhow!("unknown table {table:?}")))?;
    if !id.entries().contains(&entry) {
        bail!(config_error(anyhow!("table {table} has no entry {entry:?}")));
    }
    let n = cfg.n;
    if n < 7 {
        bail!(config_error(anyhow!("n = {n} < 7")));
    }
    let x = crate::config::parse_rational(&cfg.p)?;
    let all = match id {
        TableId::Polar => verify_polar(&[n]),
        TableId::Autonomous => {
            params_of(n, &cfg.p)?;
            verify_autonomous(&[n], &[x])
        }
        TableId::Nonautonomous => {
            if x == q(0, 1) {
                bail!(config_error(anyhow!("t = 0 is a pole")));
            }
            verify_nonautonomous(&[n], &[x])
        }
        TableId::LowerCritical | TableId::UpperCritical => verify_critical(&[n]),
        TableId::PohozaevP | TableId::PohozaevPAsym => verify_pohozaev_expansions(&[n], &large_t_samples()).0,
    };
    let name = if id == TableId::PohozaevPAsym { "pohozaev-p" } else { id.name() };
    Ok(all.into_iter().filter(|e| e.table == name && e.entry == entry).collect())
}

// ---- symbol-roots ------------------------------------------------------------

fn cmd_symbol_roots(cfg: &RunConfig, _ctx: &Ctx) -> Result<RunReport> {
    let params = cfg.params()?;
    let mut report = RunReport::new(cfg);
    let sym = symbol_poly(&emden_fowler_conjugate(&params)).map_err(|e| anyhow!("{e}"))?;
    let g = params.gamma();
    let n = params.n();
    let expected: Vec<_> = [0, 2, 4, 6 - n, 4 - n, 2 - n].iter().map(|s| &g + q(*s, 1)).collect();
    let exact_zero = expected.iter().all(|r| sym.eval(r) == q(0, 1));
    let prod = expected.iter().fold(q(1, 1), |a, r| a * r);
    let vieta = prod == sym.coeffs[0] && sym.coeffs[0] == -k0_product(&params);
    let (roots, residuals) = certified_roots(&sym.coeffs_f64()).map_err(|e| anyhow!("{e}"))?;
    let err = expected
        .iter()
        .map(|r| roots.iter().map(|z| (z - to_f64(r)).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    report.check(Check::new("expected-roots-exact", exact_zero, "q vanishes at gamma+{0,2,4,6-n,4-n,2-n}"));
    report.check(Check::new("vieta-product", vieta, format!("product of roots = {} = -K0", fmt_q(&sym.coeffs[0]))));
    report.check(Check::new("numeric-roots", err <= 1e-10, format!("max distance {err:.2e}")));
    let spectrum = match classify_regime(&params) {
        Regime::GidasSpruck | Regime::UpperCritical => {
            let v = *equilibria(&params).map_err(|e| anyhow!("{e}"))?.last().unwrap();
            Some(stability_spectrum(&params, v).map_err(|e| anyhow!("{e}"))?)
        }
        _ => None,
    };
    report.data = json!({
        "coefficients": sym.coeffs.iter().map(fmt_q).collect::<Vec<_>>(),
        "expected_roots": expected.iter().map(fmt_q).collect::<Vec<_>>(),
        "numeric_roots": roots.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "residuals": residuals,
        "linearisation_at_nonzero_equilibrium": spectrum.map(|s| json!({
            "roots": s.roots.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "residuals": s.residuals,
        })),
    });
    Ok(report)
}

// ---- equilibrium ---------------------------------------------------------------

fn cmd_equilibrium(cfg: &RunConfig, _ctx: &Ctx) -> Result<RunReport> {
    let params = cfg.params()?;
    require_regime(&params, &[Regime::SerrinLions, Regime::Aviles, Regime::GidasSpruck, Regime::UpperCritical])?;
    let mut report = RunReport::new(cfg);
    let eqs = equilibria(&params).map_err(|e| anyhow!("{e}"))?;
    let eqs_hp = equilibria_hp(&params).map_err(|e| anyhow!("{e}"))?;
    let mut spectra = Vec::new();
    for &e in &eqs {
        let map = constant_state_map(&params, e);
        let scale = 1.0 + e.abs().powf(params.p_f64());
        report.check(Check::new(&format!("fixed-point v={e:.12e}"), map.abs() <= 1e-9 * scale, format!("residual {map:.2e}")));
        let s = stability_spectrum(&params, e).map_err(|e| anyhow!("{e}"))?;
        spectra.push(json!({
            "equilibrium": e,
            "roots": s.roots.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "stable_modes": s.stable_modes().len(),
        }));
    }
    let mut level = None;
    if eqs.len() > 1 {
        let h = h_rad_autonomous(&params, &State6::constant(eqs[1]));
        let l = ell_star(&params).map_err(|e| anyhow!("{e}"))?.to_f64();
        let rel = ((h + l) / l).abs();
        report.check(Check::new("pohozaev-level", rel <= 1e-10, format!("H(v*) = {h:.12e}, -ell* = {:.12e}", -l)));
        level = Some(json!({ "h_rad": h, "minus_ell_star": -l, "relative_gap": rel }));
    }
    report.data = json!({
        "regime": classify_regime(&params).name(),
        "equilibria": eqs,
        "equilibria_30_digits": eqs_hp.iter().map(|h| h.to_sig_string(30)).collect::<Vec<_>>(),
        "constants": NamedConstants::compute(&params),
        "spectra": spectra,
        "level": level,
    });
    Ok(report)
}

// ---- pohozaev ------------------------------------------------------------------

fn cmd_pohozaev(cfg: &RunConfig, ctx: &Ctx) -> Result<RunReport> {
    let params = cfg.params()?;
    let ic = cfg.integrator()?;
    match require_regime(&params, &[Regime::GidasSpruck, Regime::UpperCritical, Regime::Aviles])? {
        Regime::Aviles => pohozaev_nonautonomous(cfg, ctx, &params, &ic),
        regime => pohozaev_autonomous(cfg, ctx, &params, &ic, regime == Regime::UpperCritical),
    }
}

fn pohozaev_autonomous(cfg: &RunConfig, ctx: &Ctx, params: &Params, ic: &IntegratorConfig, conservative: bool) -> Result<RunReport> {
    let mut report = RunReport::new(cfg);
    let traj = shoot_cached(ctx, params, cfg, ic)?;
    let identity = verify_monotonicity_identity_symbolic(params).map_err(|e| anyhow!("{e}"))?;
    let check = monotonicity_check(params, &traj, cfg.samples).map_err(|e| anyhow!("{e}"))?;
    let level = limit_level(params, &traj).map_err(|e| anyhow!("{e}"))?;
    report.check(Check::new(
        "dual-path",
        check.max_scaled_corrected_mismatch <= 1e-6,
        format!(
            "max |dP_num - dP_formula - residual| = {:.2e} (scaled {:.2e}); without the residual {:.2e}",
            check.max_corrected_mismatch, check.max_scaled_corrected_mismatch, check.max_mismatch
        ),
    ));
    report.check(Check::new(
        "limit-level",
        level.class == LevelClass::MinusEllStar,
        format!("{:?}: P = {:.10e} vs -ell* = {:.10e}", level.class, level.terminal_value, level.reference),
    ));
    let mut conservation = None;
    if conservative {
        let drift = conservation_drift(params, &traj);
        report.check(Check::new("conservation", drift <= 1e-7, format!("P drift {drift:.2e} over the trajectory")));
        conservation = Some(drift);
    }
    report.discrepancies = identity.report.mismatches().cloned().collect();
    report.data = json!({
        "regime": classify_regime(params).name(),
        "shot": traj.shot,
        "symbolic_residual": identity.residual,
        "leftover_nonlinear_terms": identity.leftover_nonlinear,
        "printed_rhs_identically_zero": identity.printed_rhs_identically_zero,
        "sign_counts": { "positive": check.positive, "negative": check.negative, "flat": check.flat },
        "nonincreasing": check.nonincreasing,
        "limit_level": level,
        "conservation_drift": conservation,
        "integrator": traj.stats,
    });
    ctx.artifact(&mut report, "pohozaev.csv", |f| check.write_csv(f).map_err(Into::into))?;
    ctx.artifact(&mut report, "trajectory.csv", |f| traj.write_csv(f).map_err(Into::into))?;
    Ok(report)
}

/// Critical exponent: the constant-state defect, the probe against the
/// candidate levels and a unit-length integration from the constant state.
fn pohozaev_nonautonomous(cfg: &RunConfig, ctx: &Ctx, params: &Params, ic: &IntegratorConfig) -> Result<RunReport> {
    let n = params.n();
    let mut report = RunReport::new(cfg);
    let w0 = HpReal::pow_q(&k0_hat(n), &q(n - 6, 6)).map_err(|e| anyhow!("{e}"))?.to_f64();
    let ts = [-1e2, -1e3, -1e4];
    let mut defects = Vec::new();
    for t in ts {
        let d = rhs_nonautonomous(n, t, &State6::constant(w0)).map_err(|e| anyhow!("{e}"))?[5];
        defects.push(d.abs() / w0);
    }
    let order = (defects[0] / defects[2]).log10() / 2.0;
    report.check(Check::new(
        "constant-state-defect",
        order >= 1.75,
        format!("w0 = {w0:.10e}; defect decays like |t|^-{order:.2}"),
    ));
    let t0 = -cfg.horizon;
    let traj = integrate(&Field::nonautonomous(n), t0, State6::constant(w0), t0 - 1.0, ic).map_err(|e| anyhow!("{e}"))?;
    let last = *traj.states.last().unwrap();
    let level = aviles_level_of(n, last.0[0]).map_err(|e| anyhow!("{e}"))?;
    report.check(Check::new(
        "terminal-class",
        level.class == LevelClass::AvilesNonzero,
        format!("{:?} at t = {:.3}: w = {:.10e}", level.class, traj.t_last(), last.0[0]),
    ));
    let probe = aviles_probe(n, -1e6).map_err(|e| anyhow!("{e}"))?;
    let candidates = aviles_level_candidates(n);
    let values: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, s)| Ok((*t, h_rad_nonautonomous(n, *t, s)?)))
        .collect::<singlab_core::Result<_>>()
        .map_err(|e| anyhow!("{e}"))?;
    report.data = json!({
        "regime": "aviles",
        "w0": w0,
        "defect_samples": ts.iter().zip(&defects).map(|(t, d)| [*t, *d]).collect::<Vec<_>>(),
        "terminal": level,
        "probe": probe,
        "level_candidates": candidates,
        "integrator": traj.stats,
    });
    ctx.artifact(&mut report, "pohozaev.csv", |f| {
        let mut w = csv::Writer::from_writer(f);
        w.write_record(["t", "P"])?;
        for (t, p) in &values {
            w.write_record([format!("{t:.16e}"), format!("{p:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    })?;
    ctx.artifact(&mut report, "trajectory.csv", |f| traj.write_csv(f).map_err(Into::into))?;
    Ok(report)
}

// ---- rate-fit ------------------------------------------------------------------

fn cmd_rate_fit(cfg: &RunConfig, ctx: &Ctx) -> Result<RunReport> {
    let window = cfg.window()?;
    let mut report = RunReport::new(cfg);
    let count = cfg.samples.max(16);
    let (profile, fit, targets): (RadialProfile, _, _) = match cfg.probe {
        Probe::Trajectory => {
            let params = cfg.params()?;
            let ic = cfg.integrator()?;
            require_regime(&params, &[Regime::GidasSpruck, Regime::UpperCritical])?;
            let w = window.unwrap_or(DEFAULT_WINDOW);
            let traj = shoot_cached(ctx, &params, cfg, &ic)?;
            if w.0 < (-cfg.horizon).exp() {
                bail!(config_error(anyhow!("window {w:?} reaches beyond the horizon {}", cfg.horizon)));
            }
            let prof = profile_from_trajectory_on(&params, &traj, w.0, w.1, count).map_err(|e| anyhow!("{e}"))?;
            let fit = fit_rate(&prof, w, FitModel::PurePower).map_err(|e| anyhow!("{e}"))?;
            let c = HpReal::pow_q(&k0_product(&params), &(q(1, 1) / (params.p() - q(1, 1)))).map_err(|e| anyhow!("{e}"))?.to_f64();
            let g = to_f64(&params.gamma());
            report.check(Check::new("exponent", (fit.exponent + g).abs() <= 1e-2, format!("{:.8} vs {:.8}", fit.exponent, -g)));
            report.check(Check::new("constant", ((fit.constant - c) / c).abs() <= 1e-2, format!("{:.8} vs {c:.8}", fit.constant)));
            (prof, fit, json!({ "exponent": -g, "constant": c }))
        }
        Probe::AvilesAnsatz => {
            let n = cfg.n;
            if n < 7 {
                bail!(config_error(anyhow!("n = {n} < 7")));
            }
            let w = window.unwrap_or((1e-12, 1e-6));
            let prof = aviles_ansatz_profile(n, w.0, w.1, count).map_err(|e| anyhow!("{e}"))?;
            let fit = fit_rate(&prof, w, FitModel::PowerLog).map_err(|e| anyhow!("{e}"))?;
            let b = (6 - n) as f64 / 6.0;
            let a = (6 - n) as f64;
            report.check(Check::new("log-exponent", (fit.log_exponent - b).abs() <= 1e-3, format!("{:.8} vs {b:.8}", fit.log_exponent)));
            report.check(Check::new("exponent", (fit.exponent - a).abs() <= 1e-3, format!("{:.8} vs {a}", fit.exponent)));
            (prof, fit, json!({ "exponent": a, "log_exponent": b }))
        }
        Probe::SerrinLions => {
            let n = cfg.n;
            if n < 7 {
                bail!(config_error(anyhow!("n = {n} < 7")));
            }
            let w = window.unwrap_or(DEFAULT_WINDOW);
            let prof = serrin_lions_probe_profile(n, w.0, w.1, count).map_err(|e| anyhow!("{e}"))?;
            let fit = fit_rate(&prof, w, FitModel::PurePower).map_err(|e| anyhow!("{e}"))?;
            let a = (6 - n) as f64;
            report.check(Check::new("exponent", (fit.exponent - a).abs() <= 1e-2, format!("{:.8} vs {a}", fit.exponent)));
            (prof, fit, json!({ "exponent": a }))
        }
    };
    report.data = json!({ "probe": cfg.probe, "fit": fit, "targets": targets });
    ctx.artifact(&mut report, "ratefit.json", |f| serde_json::to_writer_pretty(f, &fit).map_err(Into::into))?;
    ctx.artifact(&mut report, "profile.csv", |f| profile.write_csv(f).map_err(Into::into))?;
    Ok(report)
}

// ---- aviles-balance --------------------------------------------------------------

fn cmd_aviles_balance(cfg: &RunConfig, _ctx: &Ctx) -> Result<RunReport> {
    let ns = if cfg.n_list.is_empty() { vec![cfg.n] } else { cfg.n_list.clone() };
    if let Some(n) = ns.iter().find(|n| **n < 7) {
        bail!(config_error(anyhow!("n = {n} < 7")));
    }
    let mut report = RunReport::new(cfg);
    let mut rows = Vec::new();
    for n in ns {
        let b = aviles_leading_balance(n).map_err(|e| anyhow!("{e}"))?;
        report.check(Check::new(
            &format!("balance n={n}"),
            b.exponents_match && b.matches_k0_hat,
            format!("A = {} = {:.12e}; K0hat^((n-6)/6) = {:.12e}", b.derived_constant, b.derived_value, b.k0_hat_value),
        ));
        rows.push(json!({ "balance": b, "level_candidates": aviles_level_candidates(n) }));
    }
    report.data = json!({ "rows": rows });
    Ok(report)
}

// ---- sign-profile --------------------------------------------------------------

fn cmd_sign_profile(cfg: &RunConfig, _ctx: &Ctx) -> Result<RunReport> {
    let params = cfg.params()?;
    let mut report = RunReport::new(cfg);
    let s = sign_profile(&params).map_err(|e| anyhow!("{e}"))?;
    // the audit records agreement; completeness is the check
    report.check(Check::new("complete", s.entries.len() == 6, format!("{} of 6 claims hold", s.entries.iter().filter(|e| e.matches_claim).count())));
    report.data = serde_json::to_value(&s)?;
    Ok(report)
}

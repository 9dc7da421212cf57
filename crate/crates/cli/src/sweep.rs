use crate::cache::content_hash;
use crate::commands::{run, Ctx};
use crate::config::{config_error, is_config_error, params_of, RunConfig};
use crate::report::{Check, RunReport};
use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

const CELL_EXPERIMENTS: [&str; 6] = ["sign-profile", "symbol-roots", "equilibrium", "pohozaev", "rate-fit", "aviles-balance"];

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Cell {
    n: i64,
    p: String,
    experiment: String,
    passed: bool,
    /// The experiment does not apply to this `(n, p)`.
    skipped: bool,
    error: Option<String>,
    checks: Vec<Check>,
    data: serde_json::Value,
}

pub fn cmd_sweep(cfg: &RunConfig, ctx: &Ctx) -> Result<RunReport> {
    let experiments = if cfg.experiments.is_empty() {
        vec!["sign-profile".to_string(), "equilibrium".to_string()]
    } else {
        cfg.experiments.clone()
    };
    if let Some(e) = experiments.iter().find(|e| !CELL_EXPERIMENTS.contains(&e.as_str())) {
        bail!(config_error(anyhow!("experiment {e:?} cannot run in a sweep; choose from {CELL_EXPERIMENTS:?}")));
    }
    let ns = if cfg.n_list.is_empty() { vec![cfg.n] } else { cfg.n_list.clone() };
    let ps = if cfg.p_list.is_empty() { vec![cfg.p.clone()] } else { cfg.p_list.clone() };
    let mut grid = Vec::new();
    for &n in &ns {
        for p in &ps {
            params_of(n, p)?;
            for e in &experiments {
                grid.push((n, p.clone(), e.clone()));
            }
        }
    }
    if grid.is_empty() {
        bail!(config_error(anyhow!("empty sweep grid")));
    }
    grid.sort_by(|a, b| (a.0, &a.1, &a.2).cmp(&(b.0, &b.1, &b.2)));
    grid.dedup();

    let inner = Ctx { cache: ctx.cache, out: None };
    let mut cells: Vec<Cell> = grid
        .par_iter()
        .map(|(n, p, e)| {
            let cell_cfg = RunConfig {
                experiment: e.clone(),
                n: *n,
                p: p.clone(),
                n_list: Vec::new(),
                p_list: Vec::new(),
                experiments: Vec::new(),
                ..cfg.clone()
            };
            let key = content_hash(&[singlab_core::VERSION, &cell_cfg.fingerprint()]);
            ctx.cache.get_or_compute("cell", &key, || {
                Ok(match run(&cell_cfg, &inner) {
                    Ok(r) => Cell { n: *n, p: p.clone(), experiment: e.clone(), passed: r.passed, skipped: false, error: None, checks: r.checks, data: r.data },
                    Err(err) => Cell {
                        n: *n,
                        p: p.clone(),
                        experiment: e.clone(),
                        passed: is_config_error(&err),
                        skipped: is_config_error(&err),
                        error: Some(format!("{err:#}")),
                        checks: Vec::new(),
                        data: serde_json::Value::Null,
                    },
                })
            })
        })
        .collect::<Result<_>>()?;
    cells.sort_by(|a, b| (a.n, &a.p, &a.experiment).cmp(&(b.n, &b.p, &b.experiment)));

    let mut report = RunReport::new(cfg);
    for c in &cells {
        let detail = match &c.error {
            Some(e) if c.skipped => format!("skipped: {e}"),
            Some(e) => e.clone(),
            None => format!("{}/{} checks passed", c.checks.iter().filter(|k| k.passed).count(), c.checks.len()),
        };
        report.check(Check::new(&format!("{} n={} p={}", c.experiment, c.n, c.p), c.passed, detail));
    }
    report.data = json!({ "cells": cells });
    if let Some(dir) = ctx.out {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("sweep.csv"))?;
        w.write_record(["n", "p", "experiment", "passed", "skipped", "error"])?;
        for c in &cells {
            w.write_record([c.n.to_string(), c.p.clone(), c.experiment.clone(), c.passed.to_string(), c.skipped.to_string(), c.error.clone().unwrap_or_default()])?;
        }
        w.flush()?;
        report.artifacts.push("sweep.csv".into());
    }
    Ok(report)
}

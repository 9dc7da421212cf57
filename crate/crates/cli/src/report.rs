use crate::config::{Format, RunConfig};
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use singlab_core::DiscrepancyEntry;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

/// Wall-clock data; the only nondeterministic part of a report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub cache_hits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub engine_version: String,
    pub experiment: String,
    pub config: RunConfig,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub discrepancies: Vec<DiscrepancyEntry>,
    pub data: Value,
    /// File names relative to the output directory.
    pub artifacts: Vec<String>,
    pub timing: Timing,
}

impl RunReport {
    pub fn new(cfg: &RunConfig) -> Self {
        RunReport {
            engine_version: singlab_core::VERSION.into(),
            experiment: cfg.experiment.clone(),
            config: cfg.clone(),
            passed: true,
            checks: Vec::new(),
            discrepancies: Vec::new(),
            data: Value::Null,
            artifacts: Vec::new(),
            timing: Timing::default(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join("report.json"), text + "\n")?;
        Ok(())
    }

    /// Text for stdout in the requested format.
    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(self)? + "\n",
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["check", "passed", "detail"])?;
                for c in &self.checks {
                    w.write_record([c.name.as_str(), if c.passed { "true" } else { "false" }, c.detail.as_str()])?;
                }
                String::from_utf8(w.into_inner()?)?
            }
        })
    }
}

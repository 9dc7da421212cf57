//! Run configuration: defaults, a TOML file (top-level keys plus one section
//! per experiment), `SINGLAB_*` environment variables and flags, in
//! increasing precedence. Every layer is a TOML table so they merge uniformly.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use singlab_core::cylinder_dynamics::{IntegratorConfig, Seed};
use singlab_core::rat::parse_q;
use singlab_core::{Params, Q};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Probe {
    /// Shot trajectory converted to a profile.
    #[default]
    Trajectory,
    /// Exact critical log ansatz.
    AvilesAnsatz,
    /// Synthetic `r^{6-n}(1+r)`.
    SerrinLions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedSpec {
    pub amplitude: f64,
    pub mode: usize,
    pub phase: f64,
}

impl Default for SeedSpec {
    fn default() -> Self {
        let s = Seed::default();
        SeedSpec { amplitude: s.amplitude, mode: s.mode, phase: s.phase }
    }
}

impl SeedSpec {
    pub fn seed(&self) -> Seed {
        Seed { amplitude: self.amplitude, mode: self.mode, phase: self.phase }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: String,
    pub n: i64,
    /// Exact rational, `"a/b"`.
    pub p: String,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// `"rmin:rmax"`.
    pub window: Option<String>,
    pub horizon: f64,
    pub samples: usize,
    pub seed: SeedSpec,
    pub out: PathBuf,
    pub format: Format,
    pub table: Option<String>,
    pub entry: Option<String>,
    pub n_list: Vec<i64>,
    pub p_list: Vec<String>,
    pub t_list: Vec<String>,
    pub probe: Probe,
    pub experiments: Vec<String>,
    pub cache: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ic = IntegratorConfig::default();
        RunConfig {
            experiment: String::new(),
            n: 9,
            p: "4".into(),
            rel_tol: ic.rel_tol,
            abs_tol: ic.abs_tol,
            window: None,
            horizon: 30.0,
            samples: 400,
            seed: SeedSpec::default(),
            out: PathBuf::from("singlab-out"),
            format: Format::Json,
            table: None,
            entry: None,
            n_list: Vec::new(),
            p_list: Vec::new(),
            t_list: Vec::new(),
            probe: Probe::Trajectory,
            experiments: Vec::new(),
            cache: true,
        }
    }
}

/// Problems with the configuration itself; the binary maps these to exit 2.
#[derive(Debug)]
pub struct ConfigError(pub anyhow::Error);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(e: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(ConfigError(e.into()))
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Keys of a config file that apply to `experiment`: top-level scalars and
/// arrays, then the `[experiment]` section.
fn file_layer(path: &Path, experiment: &str) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let table: toml::Table = text.parse().with_context(|| format!("parsing {}", path.display()))?;
    let mut out = toml::Table::new();
    let mut section = None;
    for (k, v) in table {
        match v {
            toml::Value::Table(t) if k == "seed" => {
                out.insert(k, toml::Value::Table(t));
            }
            toml::Value::Table(t) => {
                if k == experiment {
                    section = Some(t);
                }
            }
            v => {
                out.insert(k, v);
            }
        }
    }
    if let Some(s) = section {
        merge(&mut out, s);
    }
    Ok(out)
}

/// Builds the configuration from all layers; `cli` holds only flags that were given.
pub fn resolve(experiment: &str, file: Option<&Path>, cli: toml::Table) -> Result<RunConfig> {
    let mut layers = toml::Table::new();
    if let Some(path) = file {
        merge(&mut layers, file_layer(path, experiment).map_err(config_error)?);
    }
    merge(&mut layers, cli);
    layers.insert("experiment".into(), toml::Value::String(experiment.into()));
    let cfg: RunConfig = toml::Value::Table(layers).try_into().map_err(|e: toml::de::Error| config_error(anyhow!("{e}")))?;
    cfg.integrator()?;
    cfg.window()?;
    if !(cfg.horizon > 0.0) || cfg.samples == 0 {
        bail!(config_error(anyhow!("horizon and samples must be positive")));
    }
    Ok(cfg)
}

impl RunConfig {
    pub fn params(&self) -> Result<Params> {
        params_of(self.n, &self.p)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig> {
        let ic = IntegratorConfig::with_tol(self.rel_tol, self.abs_tol);
        ic.validate().map_err(config_error)?;
        Ok(ic)
    }

    pub fn window(&self) -> Result<Option<(f64, f64)>> {
        self.window.as_deref().map(parse_window).transpose()
    }

    pub fn p_values(&self) -> Result<Vec<Q>> {
        self.p_list.iter().map(|s| parse_rational(s)).collect()
    }

    pub fn t_values(&self) -> Result<Vec<Q>> {
        self.t_list.iter().map(|s| parse_rational(s)).collect()
    }

    /// Content identity of everything that affects results.
    pub fn fingerprint(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        c.format = Format::Json;
        c.cache = true;
        serde_json::to_string(&c).expect("serialisable")
    }
}

pub fn parse_rational(s: &str) -> Result<Q> {
    parse_q(s).ok_or_else(|| config_error(anyhow!("malformed rational {s:?}, expected a/b")))
}

pub fn params_of(n: i64, p: &str) -> Result<Params> {
    let p = parse_rational(p)?;
    Params::new(n, p).map_err(config_error)
}

pub fn parse_window(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s.split_once(':').ok_or_else(|| config_error(anyhow!("window {s:?} must be rmin:rmax")))?;
    let lo: f64 = a.trim().parse().map_err(|e| config_error(anyhow!("window lower end {a:?}: {e}")))?;
    let hi: f64 = b.trim().parse().map_err(|e| config_error(anyhow!("window upper end {b:?}: {e}")))?;
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        bail!(ConfigError(anyhow!("window must satisfy 0 < rmin < rmax < 1, got {s}")));
    }
    Ok((lo, hi))
}

pub fn is_config_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| c.is::<ConfigError>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layers_merge_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lab.toml");
        std::fs::write(&path, "n = 10\np = \"5/2\"\nhorizon = 12.0\n[pohozaev]\nhorizon = 20.0\n[seed]\namplitude = 0.002\n").unwrap();
        let mut cli = toml::Table::new();
        cli.insert("n".into(), toml::Value::Integer(11));
        let c = resolve("pohozaev", Some(&path), cli).unwrap();
        assert_eq!(c.n, 11);
        assert_eq!(c.p, "5/2");
        assert_eq!(c.horizon, 20.0);
        assert_eq!(c.seed.amplitude, 0.002);
        let c = resolve("rate-fit", Some(&path), toml::Table::new()).unwrap();
        assert_eq!(c.horizon, 12.0);
    }

    #[test]
    fn bad_values_are_config_errors() {
        let c = RunConfig { p: "abc".into(), ..Default::default() };
        assert!(is_config_error(&c.params().unwrap_err()));
        assert!(is_config_error(&parse_window("0.1").unwrap_err()));
        assert!(is_config_error(&parse_window("0.5:0.1").unwrap_err()));
        let c = RunConfig { rel_tol: 1.0, ..Default::default() };
        assert!(is_config_error(&c.integrator().unwrap_err()));
        let mut cli = toml::Table::new();
        cli.insert("bogus".into(), toml::Value::Integer(1));
        assert!(is_config_error(&resolve("sweep", None, cli).unwrap_err()));
    }
}

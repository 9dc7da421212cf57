mod cache;
mod commands;
mod config;
mod report;
mod sweep;

use cache::Cache;
use clap::{Args, Parser, Subcommand};
use commands::Ctx;
use config::{is_config_error, resolve, Format, Probe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "singlab", version, about = "Coefficient checks, shooting and Pohozaev experiments for radial sixth-order problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute the coefficient tables and compare with the printed values.
    VerifyCoefficients {
        #[command(flatten)]
        common: Common,
        /// Single-entry mode: table name.
        #[arg(long, requires = "entry")]
        table: Option<String>,
        /// Single-entry mode: entry name.
        #[arg(long, requires = "table")]
        entry: Option<String>,
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<i64>,
        #[arg(long, value_delimiter = ',')]
        p_list: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        t_list: Vec<String>,
    },
    /// Certify the roots of the indicial polynomial.
    SymbolRoots {
        #[command(flatten)]
        common: Common,
    },
    /// Equilibria, named constants and linearised spectra.
    Equilibrium {
        #[command(flatten)]
        common: Common,
    },
    /// Shoot to the equilibrium and track the Pohozaev functional.
    Pohozaev {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        shot: Shot,
    },
    /// Fit the blow-up rate of a radial profile.
    RateFit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        shot: Shot,
        #[arg(long, value_enum)]
        probe: Option<Probe>,
    },
    /// Leading-order balance of the critical log ansatz.
    AvilesBalance {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<i64>,
    },
    /// Run several experiments over an (n, p) grid in parallel.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        shot: Shot,
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<i64>,
        #[arg(long, value_delimiter = ',')]
        p_list: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        experiments: Vec<String>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML config file.
    #[arg(long, env = "SINGLAB_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, env = "SINGLAB_N")]
    n: Option<i64>,
    /// Exponent as an exact rational, e.g. 5/2.
    #[arg(long, env = "SINGLAB_P")]
    p: Option<String>,
    #[arg(long, env = "SINGLAB_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "SINGLAB_REL_TOL")]
    rel_tol: Option<f64>,
    #[arg(long, env = "SINGLAB_ABS_TOL")]
    abs_tol: Option<f64>,
    /// Fit window rmin:rmax.
    #[arg(long, env = "SINGLAB_WINDOW")]
    window: Option<String>,
    #[arg(long, env = "SINGLAB_FORMAT", value_enum)]
    format: Option<Format>,
    /// Skip the on-disk cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct Shot {
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed_amplitude: Option<f64>,
    #[arg(long)]
    seed_mode: Option<usize>,
}

fn put(t: &mut toml::Table, key: &str, v: Option<impl Into<toml::Value>>) {
    if let Some(v) = v {
        t.insert(key.into(), v.into());
    }
}

fn put_list<T: Clone + Into<toml::Value>>(t: &mut toml::Table, key: &str, v: &[T]) {
    if !v.is_empty() {
        t.insert(key.into(), toml::Value::Array(v.iter().cloned().map(Into::into).collect()));
    }
}

fn enum_name<T: clap::ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("named variant").get_name().to_string()
}

impl Common {
    fn table(&self) -> toml::Table {
        let mut t = toml::Table::new();
        put(&mut t, "n", self.n);
        put(&mut t, "p", self.p.clone());
        put(&mut t, "out", self.out.as_ref().map(|p| p.display().to_string()));
        put(&mut t, "rel_tol", self.rel_tol);
        put(&mut t, "abs_tol", self.abs_tol);
        put(&mut t, "window", self.window.clone());
        put(&mut t, "format", self.format.map(enum_name));
        if self.no_cache {
            t.insert("cache".into(), false.into());
        }
        t
    }
}

impl Shot {
    fn add(&self, t: &mut toml::Table) {
        put(t, "horizon", self.horizon);
        put(t, "samples", self.samples.map(|s| s as i64));
        let mut seed = toml::Table::new();
        put(&mut seed, "amplitude", self.seed_amplitude);
        put(&mut seed, "mode", self.seed_mode.map(|s| s as i64));
        if !seed.is_empty() {
            t.insert("seed".into(), seed.into());
        }
    }
}

impl Command {
    fn layer(&self) -> (&'static str, &Common, toml::Table) {
        match self {
            Command::VerifyCoefficients { common, table, entry, n_list, p_list, t_list } => {
                let mut t = common.table();
                put(&mut t, "table", table.clone());
                put(&mut t, "entry", entry.clone());
                put_list(&mut t, "n_list", n_list);
                put_list(&mut t, "p_list", p_list);
                put_list(&mut t, "t_list", t_list);
                ("verify-coefficients", common, t)
            }
            Command::SymbolRoots { common } => ("symbol-roots", common, common.table()),
            Command::Equilibrium { common } => ("equilibrium", common, common.table()),
            Command::Pohozaev { common, shot } => {
                let mut t = common.table();
                shot.add(&mut t);
                ("pohozaev", common, t)
            }
            Command::RateFit { common, shot, probe } => {
                let mut t = common.table();
                shot.add(&mut t);
                put(&mut t, "probe", probe.map(enum_name));
                ("rate-fit", common, t)
            }
            Command::AvilesBalance { common, n_list } => {
                let mut t = common.table();
                put_list(&mut t, "n_list", n_list);
                ("aviles-balance", common, t)
            }
            Command::Sweep { common, shot, n_list, p_list, experiments } => {
                let mut t = common.table();
                shot.add(&mut t);
                put_list(&mut t, "n_list", n_list);
                put_list(&mut t, "p_list", p_list);
                put_list(&mut t, "experiments", experiments);
                ("sweep", common, t)
            }
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    let start = Instant::now();
    let (experiment, common, table) = cli.command.layer();
    let cfg = resolve(experiment, common.config.as_deref(), table)?;
    let cache = Cache::new(cfg.cache.then(|| cfg.out.join("cache")));
    let ctx = Ctx { cache: &cache, out: Some(&cfg.out) };
    let mut report = commands::run(&cfg, &ctx)?;
    report.timing.wall_seconds = start.elapsed().as_secs_f64();
    report.timing.cache_hits = cache.hits();
    report.write(&cfg.out)?;
    print!("{}", report.render(cfg.format)?);
    Ok(report.passed)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("singlab: {e:#}");
            ExitCode::from(if is_config_error(&e) { 2 } else { 1 })
        }
    }
}

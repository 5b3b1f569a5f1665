//! Command-line front end.
//!
//! Settings are layered: a TOML file (`--config`), then `CHIRAL_SCATTER_*`
//! environment variables, then flags. Unknown keys are rejected at every
//! layer.
//!
//! Exit codes: 0 success, 1 validation failure, 2 bad configuration,
//! 3 numerical convergence failure, 4 finite pair width requested,
//! 5 disorder resampling limit hit.

mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::disorder::{ensemble_average, DisorderConfig};
use crate::error::{invalid, Error, Result};
use crate::model::{EmitterArray, GaussianPacket1, GaussianPacket2, Grid, DEFAULT_DEGENERACY_TOL};
use crate::single_photon::{self, propagate_single_parts};
use crate::two_photon::{self, two_photon_out};
use crate::validation::{run_validation, Tolerances};
use output::{Column, Table};

/// Prefix of environment variables that override configuration keys.
pub const ENV_PREFIX: &str = "CHIRAL_SCATTER_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    #[default]
    Single,
    Two,
    Disorder,
    Sweep,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything a run depends on. All values are in units of the coupling κ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Number of emitters; defaults to 1 (or the length of `detunings`).
    pub m: Option<usize>,
    /// Explicit emitter detunings; all zero when absent.
    pub detunings: Option<Vec<f64>>,
    pub delta: f64,
    pub sigma: f64,
    /// Width of the pair's centre-of-mass envelope; absent means infinite.
    pub mu: Option<f64>,
    /// Standard deviation of the detuning disorder (`--Sigma`).
    pub disorder: f64,
    pub samples: usize,
    pub seed: u64,
    /// `start:stop:n`; a range covering the output is chosen when absent.
    pub grid: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub constrain_mean: bool,
    pub degeneracy_tol: f64,
    /// Criterion name (or number) for `validate`.
    pub filter: Option<String>,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::new(Command::Single)
    }
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            m: None,
            detunings: None,
            delta: 0.0,
            sigma: 2.0,
            mu: None,
            disorder: 0.0,
            samples: 1000,
            seed: 0,
            grid: None,
            out: None,
            format: Format::Csv,
            constrain_mean: false,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            filter: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn emitters(&self) -> Result<EmitterArray> {
        match (&self.detunings, self.m) {
            (Some(d), Some(m)) if d.len() != m => Err(invalid(
                "m",
                format!("{m} emitters requested but {} detunings given", d.len()),
            )),
            (Some(d), _) => EmitterArray::new(d.clone())?.with_tolerance(self.degeneracy_tol),
            (None, m) => EmitterArray::degenerate(m.unwrap_or(1), 0.0).with_tolerance(self.degeneracy_tol),
        }
    }

    pub fn explicit_grid(&self) -> Result<Option<Grid>> {
        self.grid.as_deref().map(parse_grid).transpose()
    }

    /// Re-checks every parameter the selected command uses.
    pub fn validate(&self) -> Result<()> {
        self.explicit_grid()?;
        match self.command {
            Command::Single | Command::Sweep => {
                self.emitters()?;
                GaussianPacket1::new(self.delta, self.sigma)?;
            }
            Command::Two => {
                self.emitters()?;
                GaussianPacket2::new(self.delta, self.sigma, self.mu.unwrap_or(f64::INFINITY))?;
            }
            Command::Disorder => {
                if self.detunings.is_some() {
                    return Err(invalid("detunings", "disorder draws its own detunings"));
                }
                DisorderConfig::new(self.m.unwrap_or(1), self.disorder, self.delta, self.sigma, self.samples, self.seed, Grid::new(-1.0, 1.0, 3)?)?;
            }
            Command::Validate => {}
        }
        Ok(())
    }
}

/// Parses `start:stop:n`.
pub fn parse_grid(spec: &str) -> Result<Grid> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(invalid("grid", format!("expected start:stop:n, got {spec:?}")));
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| invalid("grid", format!("{s:?} is not a number")));
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| invalid("grid", format!("{n:?} is not a point count")))?;
    Grid::new(num(a)?, num(b)?, n)
}

#[derive(Debug, Parser)]
#[command(name = "chiral-scatter", version, about = "Photon scattering off emitter arrays in a chiral waveguide")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Single-photon output for a Gaussian input.
    Single(Flags),
    /// Two-photon relative wavefunction for a wide Gaussian pair.
    Two(Flags),
    /// Disorder-averaged two-photon density.
    Disorder(Flags),
    /// Single-photon norm balance for M = 0, 1, …, m.
    Sweep(Flags),
    /// Run the built-in acceptance checks.
    Validate(Flags),
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// TOML file with any of the configuration keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Comma-separated emitter detunings.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub detunings: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Detuning disorder strength.
    #[arg(long = "Sigma")]
    pub disorder: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// start:stop:n
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub constrain_mean: bool,
    #[arg(long)]
    pub filter: Option<String>,
}

/// A configuration problem, reported with exit code 2.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn config_error(source: &str, e: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("{source}: {e}"))
}

/// Merges file, environment and flags into a validated [`RunConfig`].
pub fn resolve(
    command: Command,
    flags: &Flags,
    env: impl IntoIterator<Item = (String, String)>,
) -> std::result::Result<RunConfig, ConfigError> {
    let mut table = toml::Table::new();
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(&path.display().to_string(), e))?;
        // Parsed alone first so that errors point at lines of the file.
        toml::from_str::<RunConfig>(&text).map_err(|e| config_error(&path.display().to_string(), e))?;
        table = text.parse().map_err(|e| config_error(&path.display().to_string(), e))?;
    }

    let mut env: Vec<(String, String)> = env.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    env.sort();
    for (key, raw) in env {
        let name = key[ENV_PREFIX.len()..].to_ascii_lowercase();
        let value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or(toml::Value::String(raw));
        let mut one = toml::Table::new();
        one.insert(name, value);
        toml::Value::Table(one.clone())
            .try_into::<RunConfig>()
            .map_err(|e| config_error(&format!("environment variable {key}"), e))?;
        table.extend(one);
    }

    let mut set = |k: &str, v: toml::Value| {
        table.insert(k.to_string(), v);
    };
    set("command", toml::Value::String(command_name(command).into()));
    if let Some(v) = flags.m {
        set("m", toml::Value::Integer(v as i64));
    }
    if let Some(v) = &flags.detunings {
        set("detunings", toml::Value::Array(v.iter().map(|&x| toml::Value::Float(x)).collect()));
    }
    for (k, v) in [("delta", flags.delta), ("sigma", flags.sigma), ("mu", flags.mu), ("disorder", flags.disorder)] {
        if let Some(v) = v {
            set(k, toml::Value::Float(v));
        }
    }
    if let Some(v) = flags.samples {
        set("samples", toml::Value::Integer(v as i64));
    }
    if let Some(v) = flags.seed {
        set("seed", toml::Value::Integer(v as i64));
    }
    if let Some(v) = &flags.grid {
        set("grid", toml::Value::String(v.clone()));
    }
    if let Some(v) = &flags.out {
        set("out", toml::Value::String(v.display().to_string()));
    }
    if let Some(v) = flags.format {
        set("format", toml::Value::String(if v == Format::Csv { "csv" } else { "json" }.into()));
    }
    if flags.constrain_mean {
        set("constrain_mean", toml::Value::Boolean(true));
    }
    if let Some(v) = &flags.filter {
        set("filter", toml::Value::String(v.clone()));
    }

    let cfg: RunConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e| config_error("configuration", e))?;
    cfg.validate().map_err(|e| config_error("configuration", e))?;
    Ok(cfg)
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Single => "single",
        Command::Two => "two",
        Command::Disorder => "disorder",
        Command::Sweep => "sweep",
        Command::Validate => "validate",
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::SingularSeries { .. } | Error::QuadratureNotConverged { .. } | Error::TruncationNotConverged { .. } => 3,
        Error::FiniteMuUnsupported => 4,
        Error::ResampleLimitExceeded { .. } => 5,
        _ => 2,
    }
}

/// Output bytes of a run and the exit code it should end with.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub bytes: Vec<u8>,
    pub exit_code: i32,
    /// One human-readable line per validation criterion.
    pub summary: Vec<String>,
}

/// Runs the configured command and formats its output.
pub fn render(cfg: &RunConfig) -> Result<Rendered> {
    cfg.validate()?;
    let table = match cfg.command {
        Command::Single => run_single(cfg)?,
        Command::Two => run_two(cfg)?,
        Command::Disorder => run_disorder(cfg)?,
        Command::Sweep => run_sweep(cfg)?,
        Command::Validate => return run_validate(cfg),
    };
    Ok(Rendered {
        bytes: table.render(cfg.format),
        exit_code: 0,
        summary: Vec::new(),
    })
}

fn run_single(cfg: &RunConfig) -> Result<Table> {
    let emitters = cfg.emitters()?;
    let packet = GaussianPacket1::new(cfg.delta, cfg.sigma)?;
    let grid = match cfg.explicit_grid()? {
        Some(g) => g,
        None => single_photon::default_grid(&packet, &emitters)?,
    };
    let out = propagate_single_parts(&packet, &emitters, &grid)?;
    let ys: Vec<f64> = grid.points().collect();
    let mut t = Table::new(cfg, &grid, Some(&emitters));
    t.push("y", Column::Real(ys.clone()));
    t.push("re_phi", Column::Real(out.total.amplitudes.iter().map(|a| a.re).collect()));
    t.push("im_phi", Column::Real(out.total.amplitudes.iter().map(|a| a.im).collect()));
    t.push("density", Column::Real(out.total.density()));
    t.push("density_scattered_only", Column::Real(out.scattered.density()));
    t.push("masked", Column::Flag(ys.iter().map(|&y| (y - packet.center).abs() < packet.sigma).collect()));
    Ok(t)
}

fn run_two(cfg: &RunConfig) -> Result<Table> {
    let emitters = cfg.emitters()?;
    let packet = GaussianPacket2::new(cfg.delta, cfg.sigma, cfg.mu.unwrap_or(f64::INFINITY))?;
    if !packet.is_wide() {
        return Err(Error::FiniteMuUnsupported);
    }
    let grid = match cfg.explicit_grid()? {
        Some(g) => g,
        None => two_photon::default_grid(&packet, &emitters)?,
    };
    let out = two_photon_out(&packet, &emitters, &grid)?;
    let parts = out.parts.expect("closed-form evaluation keeps its parts");
    let mut t = Table::new(cfg, &grid, Some(&emitters));
    t.push("d", Column::Real(grid.points().collect()));
    t.push("re_phi2", Column::Real(out.phi2.iter().map(|a| a.re).collect()));
    t.push("im_phi2", Column::Real(out.phi2.iter().map(|a| a.im).collect()));
    t.push("density", Column::Real(out.density));
    t.push("density_reducible", Column::Real(parts.reducible.iter().map(|a| a.norm_sqr()).collect()));
    t.push("density_irreducible", Column::Real(parts.irreducible.iter().map(|a| a.norm_sqr()).collect()));
    Ok(t)
}

fn run_disorder(cfg: &RunConfig) -> Result<Table> {
    let m = cfg.m.unwrap_or(1);
    let packet = GaussianPacket2::new(cfg.delta, cfg.sigma, cfg.mu.unwrap_or(f64::INFINITY))?;
    if !packet.is_wide() {
        return Err(Error::FiniteMuUnsupported);
    }
    let grid = match cfg.explicit_grid()? {
        Some(g) => g,
        None => two_photon::default_grid(&packet, &EmitterArray::degenerate(m, 0.0))?,
    };
    let mut dc = DisorderConfig::new(m, cfg.disorder, cfg.delta, cfg.sigma, cfg.samples, cfg.seed, grid)?;
    dc.constrain_mean = cfg.constrain_mean;
    dc.degeneracy_tol = cfg.degeneracy_tol;
    let stats = ensemble_average(&dc)?;
    let mut t = Table::new(cfg, &grid, None);
    t.meta("n_samples", stats.n_samples_used.to_string());
    t.meta("n_resampled", stats.n_resampled.to_string());
    t.meta("seed", cfg.seed.to_string());
    t.push("d", Column::Real(grid.points().collect()));
    t.push("mean_density", Column::Real(stats.mean_density));
    t.push("median_abs_dev", Column::Real(stats.median_abs_dev));
    t.push("mean_abs_dev", Column::Real(stats.mean_abs_dev));
    t.push("std_error", Column::Real(stats.std_error));
    Ok(t)
}

fn run_sweep(cfg: &RunConfig) -> Result<Table> {
    let top = cfg.emitters()?;
    let packet = GaussianPacket1::new(cfg.delta, cfg.sigma)?;
    let grid = match cfg.explicit_grid()? {
        Some(g) => g,
        None => single_photon::default_grid(&packet, &top)?,
    };
    let incoming: Vec<f64> = grid.points().map(|y| packet.amplitude(y).norm_sqr()).collect();
    let norm_in = grid.integrate(&incoming);
    let (mut ms, mut n_out, mut change) = (Vec::new(), Vec::new(), Vec::new());
    for m in 0..=top.len() {
        let emitters = match &cfg.detunings {
            Some(d) => EmitterArray::new(d[..m].to_vec())?.with_tolerance(cfg.degeneracy_tol)?,
            None => EmitterArray::degenerate(m, 0.0),
        };
        let norm = propagate_single_parts(&packet, &emitters, &grid)?.total.norm();
        ms.push(m as u64);
        n_out.push(norm);
        change.push(norm - norm_in);
    }
    let mut t = Table::new(cfg, &grid, Some(&top));
    t.push("m", Column::Count(ms.clone()));
    t.push("norm_in", Column::Real(vec![norm_in; ms.len()]));
    t.push("norm_out", Column::Real(n_out));
    t.push("norm_change", Column::Real(change));
    Ok(t)
}

fn run_validate(cfg: &RunConfig) -> Result<Rendered> {
    let report = run_validation(cfg.filter.as_deref(), &cfg.tolerances);
    if report.criteria.is_empty() {
        return Err(invalid(
            "filter",
            format!(
                "{:?} matches none of {}",
                cfg.filter.as_deref().unwrap_or(""),
                crate::validation::criterion_names().join(", ")
            ),
        ));
    }
    let summary = report
        .criteria
        .iter()
        .map(|c| format!("criterion {} {}: {}", c.id, c.name, if c.passed { "PASS" } else { "FAIL" }))
        .collect();
    let bytes = match cfg.format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(&report).expect("report serializes");
            v.push(b'\n');
            v
        }
        Format::Csv => output::report_csv(&report),
    };
    Ok(Rendered {
        bytes,
        exit_code: if report.all_passed() { 0 } else { 1 },
        summary,
    })
}

/// Full program: parse, resolve, run, write. Returns the process exit code.
pub fn main_with<I, T>(args: I, env: impl IntoIterator<Item = (String, String)>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (command, flags) = match &cli.command {
        Sub::Single(f) => (Command::Single, f),
        Sub::Two(f) => (Command::Two, f),
        Sub::Disorder(f) => (Command::Disorder, f),
        Sub::Sweep(f) => (Command::Sweep, f),
        Sub::Validate(f) => (Command::Validate, f),
    };
    let cfg = match resolve(command, flags, env) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let rendered = match render(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    for line in &rendered.summary {
        eprintln!("{line}");
    }
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, &rendered.bytes).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&rendered.bytes).map_err(|e| e.to_string())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    rendered.exit_code
}

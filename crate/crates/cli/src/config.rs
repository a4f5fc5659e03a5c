//! Run configuration: flags, an optional `key = value` file, and defaults, in
//! that order of precedence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use cuspdet::specfun::WorkingPrecision;
use cuspdet::{Geometry, SpectralZetaParams};

pub const PRECISION_ENV: &str = "CUSPDET_PRECISION";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    Specfun,
    Hypergeom,
    Ramanujan,
    Spectrum,
    Zetadet,
    All,
}

/// Which parameter a grid runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GridVar {
    Mu,
    A,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Eig,
    Count,
    Zeta,
    Det,
    Asym,
    Sweep,
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "cuspdet", version, about = "Spectrum and determinant of the Laplacian on a hyperbolic cusp")]
#[command(allow_negative_numbers = true, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Eigenvalues λ = 1/4 + r² up to --lambda-max.
    Eig,
    /// Eigenvalue counts against the Weyl bound on a λ grid.
    Count,
    /// Spectral zeta at a strip point, by eigenvalues and by mode integrals.
    Zeta,
    /// Zeta-regularized log-determinant.
    Det,
    /// Residuals of the asymptotic formulas along a grid of a or μ.
    Asym,
    /// Log-determinant along a grid of a or μ.
    Sweep,
    /// Run the invariant checks of one module, or all of them.
    Verify {
        #[arg(value_enum)]
        selector: Selector,
        /// Reduced grids.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Debug, Default, clap::Args)]
pub struct Flags {
    /// File of `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Height of the cusp, a > 0.
    #[arg(long, global = true)]
    pub a: Option<f64>,
    /// Holonomy, 0 ≤ α < 1.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Spectral shift, μ ≥ 0.
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    /// Split exponent, 0 < δ < 1/8.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long = "lambda-max", global = true)]
    pub lambda_max: Option<f64>,
    /// Strip point, 1 < s < 2.
    #[arg(long, global = true)]
    pub s: Option<f64>,
    #[arg(long = "k-max", global = true)]
    pub k_max: Option<u32>,
    #[arg(long = "r-max", global = true)]
    pub r_max: Option<f64>,
    /// Comma-separated grid values.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    #[arg(long = "grid-var", value_enum, global = true)]
    pub grid_var: Option<GridVar>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads, ≥ 1.
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub geometry: Geometry,
    pub mu: f64,
    pub delta: f64,
    pub lambda_max: f64,
    pub s: f64,
    pub k_max: u32,
    pub r_max: f64,
    pub grid: Vec<f64>,
    pub grid_var: GridVar,
    pub format: Format,
    pub selector: Option<Selector>,
    pub quick: bool,
    pub precision_target: f64,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub parallelism: usize,
}

#[derive(Debug)]
pub enum ConfigError {
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Invalid(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(m: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(m.into())
}

const FILE_KEYS: [&str; 13] = [
    "a",
    "alpha",
    "mu",
    "delta",
    "lambda-max",
    "s",
    "k-max",
    "r-max",
    "grid",
    "grid-var",
    "format",
    "output",
    "parallelism",
];

/// Parses `key = value` lines; `#` starts a comment. Underscores in keys are
/// accepted in place of hyphens.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| invalid(format!("config line {}: expected `key = value`", n + 1)))?;
        let key = k.trim().replace('_', "-");
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(invalid(format!("config line {}: unknown key `{}`", n + 1, k.trim())));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| invalid(format!("`{key}`: cannot parse `{v}`")))
}

fn parse_grid(v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|x| parse_num::<f64>("grid", x.trim())).collect()
}

fn parse_enum<T: ValueEnum>(key: &str, v: &str) -> Result<T, ConfigError> {
    T::from_str(v, true).map_err(|_| invalid(format!("`{key}`: unknown value `{v}`")))
}

fn pick<T>(flag: Option<T>, file: &BTreeMap<String, String>, key: &str, parse: impl Fn(&str) -> Result<T, ConfigError>) -> Result<Option<T>, ConfigError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key).map(|v| parse(v)).transpose(),
    }
}

pub fn precision_from_env(value: Option<&str>) -> Result<f64, ConfigError> {
    let target = match value {
        None => return Ok(WorkingPrecision::default().relative_target),
        Some(v) => parse_num::<f64>(PRECISION_ENV, v.trim())?,
    };
    WorkingPrecision::new(target, WorkingPrecision::default().max_refinement_steps)
        .map(|w| w.relative_target)
        .map_err(|e| invalid(format!("{PRECISION_ENV}: {e}")))
}

impl RunConfig {
    pub fn resolve(cli: Cli, env_precision: Option<&str>) -> Result<RunConfig, ConfigError> {
        let file = match &cli.flags.config {
            Some(p) => load_file(p)?,
            None => BTreeMap::new(),
        };
        let f = cli.flags;
        let (command, selector, quick) = match cli.command {
            CliCommand::Eig => (Command::Eig, None, false),
            CliCommand::Count => (Command::Count, None, false),
            CliCommand::Zeta => (Command::Zeta, None, false),
            CliCommand::Det => (Command::Det, None, false),
            CliCommand::Asym => (Command::Asym, None, false),
            CliCommand::Sweep => (Command::Sweep, None, false),
            CliCommand::Verify { selector, quick } => (Command::Verify, Some(selector), quick),
        };
        fn num(key: &'static str) -> impl Fn(&str) -> Result<f64, ConfigError> {
            move |v| parse_num::<f64>(key, v)
        }
        let a = pick(f.a, &file, "a", num("a"))?.unwrap_or(1.0);
        let alpha = pick(f.alpha, &file, "alpha", num("alpha"))?.unwrap_or(0.0);
        let mu = pick(f.mu, &file, "mu", num("mu"))?.unwrap_or(0.0);
        let delta = pick(f.delta, &file, "delta", num("delta"))?.unwrap_or(0.06);
        let lambda_max = pick(f.lambda_max, &file, "lambda-max", num("lambda-max"))?.unwrap_or(100.0);
        let s = pick(f.s, &file, "s", num("s"))?.unwrap_or(1.5);
        let k_max = pick(f.k_max, &file, "k-max", |v| parse_num::<u32>("k-max", v))?.unwrap_or(5);
        let r_max = pick(f.r_max, &file, "r-max", num("r-max"))?.unwrap_or(50.0);
        let grid_var = pick(f.grid_var, &file, "grid-var", |v| parse_enum::<GridVar>("grid-var", v))?.unwrap_or(
            match command {
                Command::Sweep => GridVar::Mu,
                _ => GridVar::A,
            },
        );
        let grid = match f.grid {
            Some(g) => parse_grid(&g)?,
            None => match file.get("grid") {
                Some(g) => parse_grid(g)?,
                None => default_grid(command, grid_var, lambda_max),
            },
        };
        let format = pick(f.format, &file, "format", |v| parse_enum::<Format>("format", v))?.unwrap_or(match command {
            Command::Det => Format::Json,
            _ => Format::Csv,
        });
        let output = pick(f.output, &file, "output", |v| Ok(PathBuf::from(v)))?;
        let parallelism = pick(f.parallelism, &file, "parallelism", |v| parse_num::<usize>("parallelism", v))?
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));

        let geometry = Geometry::new(a, alpha).map_err(|e| invalid(e.to_string()))?;
        SpectralZetaParams::new(geometry, mu, delta).map_err(|e| invalid(e.to_string()))?;
        if parallelism < 1 {
            return Err(invalid("parallelism must be ≥ 1"));
        }
        if !(lambda_max > 0.25 && lambda_max.is_finite()) {
            return Err(invalid(format!("lambda-max must be a finite value > 1/4, got {lambda_max}")));
        }
        if !(s > 1.0 && s < 2.0) {
            return Err(invalid(format!("s must satisfy 1 < s < 2, got {s}")));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(invalid(format!("r-max must be > 0, got {r_max}")));
        }
        if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
            return Err(invalid("grid must hold at least one finite value"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("grid must be strictly increasing"));
        }
        let precision_target = precision_from_env(env_precision)?;
        Ok(RunConfig {
            command,
            geometry,
            mu,
            delta,
            lambda_max,
            s,
            k_max,
            r_max,
            grid,
            grid_var,
            format,
            selector,
            quick,
            precision_target,
            output,
            parallelism,
        })
    }

    pub fn params(&self) -> SpectralZetaParams {
        SpectralZetaParams { g: self.geometry, mu: self.mu, delta: self.delta }
    }
}

fn default_grid(command: Command, var: GridVar, lambda_max: f64) -> Vec<f64> {
    match (command, var) {
        (Command::Count, _) => [0.125, 0.25, 0.5, 1.0].iter().map(|f| f * lambda_max).filter(|&l| l > 1.0).collect(),
        (_, GridVar::A) => vec![5.0, 10.0, 20.0],
        (_, GridVar::Mu) => vec![25.0, 100.0, 400.0],
    }
}

fn load_file(p: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(p).map_err(|e| invalid(format!("cannot read {}: {e}", p.display())))?;
    parse_config_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(args: &[&str]) -> Result<RunConfig, ConfigError> {
        let cli = Cli::try_parse_from(std::iter::once("cuspdet").chain(args.iter().copied())).unwrap();
        RunConfig::resolve(cli, None)
    }

    #[test]
    fn defaults_and_overrides() {
        let c = resolve(&["det", "--a", "2", "--alpha", "0.3"]).unwrap();
        assert_eq!(c.geometry, Geometry { a: 2.0, alpha: 0.3 });
        assert_eq!(c.format, Format::Json);
        let c = resolve(&["eig", "--format", "json"]).unwrap();
        assert_eq!(c.format, Format::Json);
    }

    #[test]
    fn invariant_names_in_errors() {
        let e = resolve(&["det", "--alpha", "1.2"]).unwrap_err().to_string();
        assert!(e.contains("0 ≤ α < 1"), "{e}");
        let e = resolve(&["det", "--delta", "0.2"]).unwrap_err().to_string();
        assert!(e.contains("δ"), "{e}");
        assert!(resolve(&["asym", "--grid", "20,10"]).is_err());
    }

    #[test]
    fn config_file_lines() {
        let m = parse_config_text("# cusp\na = 2\nlambda_max = 50  # trailing\n\nformat=json\n").unwrap();
        assert_eq!(m["a"], "2");
        assert_eq!(m["lambda-max"], "50");
        assert_eq!(m["format"], "json");
        assert!(parse_config_text("bogus = 1").is_err());
        assert!(parse_config_text("a 2").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("cuspdet-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("run.conf");
        std::fs::write(&p, "a = 3\nalpha = 0.25\n").unwrap();
        let c = resolve(&["det", "--config", p.to_str().unwrap(), "--a", "4"]).unwrap();
        assert_eq!(c.geometry, Geometry { a: 4.0, alpha: 0.25 });
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn precision_env() {
        assert_eq!(precision_from_env(Some("1e-8")).unwrap(), 1e-8);
        assert!(precision_from_env(Some("-1")).is_err());
        assert!(precision_from_env(Some("abc")).is_err());
        assert_eq!(precision_from_env(None).unwrap(), 1e-12);
    }
}

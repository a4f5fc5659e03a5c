//! Batch front end for `cuspdet`.
//!
//! Exit status: 0 on success, 1 for invalid input or configuration, 2 when a
//! numerical routine fails to converge.

pub mod checks;
pub mod config;

use std::io::Write;

use clap::Parser;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use cuspdet::spectrum::{self, CountReport, Truncation};
use cuspdet::zetadet::{self, DeterminantReport, Regime, ResidualRow, StripCheck};
use cuspdet::{Geometry, SpectralZetaParams};

use checks::CheckRow;
use config::{Cli, Command, ConfigError, Format, GridVar, RunConfig, Selector};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

/// JSON envelope shared by all commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub command: Command,
    pub config: RunConfig,
    pub result: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub k: i64,
    pub j: usize,
    pub r: f64,
    pub lambda: f64,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaRow {
    pub s: f64,
    pub zeta_eig: f64,
    pub eig_tail_bound: f64,
    pub strip_sum: f64,
    pub difference: f64,
}

impl From<StripCheck> for ZetaRow {
    fn from(c: StripCheck) -> Self {
        ZetaRow { s: c.s, zeta_eig: c.zeta_eig, eig_tail_bound: c.eig_tail_bound, strip_sum: c.modes_sum, difference: c.difference }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: f64,
    pub alpha: f64,
    pub mu: f64,
    pub delta: f64,
    pub logdet: f64,
    pub numeric_remainder: f64,
    pub est_error: f64,
    pub route_difference: f64,
}

/// Single-row CSV form of a determinant report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetRow {
    pub logdet: f64,
    pub numeric_remainder: f64,
    pub est_error: f64,
    pub a_terms: f64,
    pub b_terms: f64,
    pub sqrt: f64,
    pub asinh: f64,
    pub log: f64,
    pub u1: f64,
}

impl From<&DeterminantReport> for DetRow {
    fn from(r: &DeterminantReport) -> Self {
        let c = |k: &str| r.family_contributions.get(k).copied().unwrap_or(0.0);
        DetRow {
            logdet: r.logdet,
            numeric_remainder: r.numeric_remainder,
            est_error: r.est_error,
            a_terms: c("a_terms"),
            b_terms: c("b_terms"),
            sqrt: c("sqrt"),
            asinh: c("asinh"),
            log: c("log"),
            u1: c("u1"),
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Validation(String),
    Numeric(String),
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) | RunError::Io(_) => EXIT_VALIDATION,
            RunError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Validation(m) => write!(f, "invalid input: {m}"),
            RunError::Numeric(m) => write!(f, "numerical failure: {m}"),
            RunError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<cuspdet::Error> for RunError {
    fn from(e: cuspdet::Error) -> Self {
        if e.is_validation() {
            RunError::Validation(e.to_string())
        } else {
            RunError::Numeric(e.to_string())
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Validation(e.to_string())
    }
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, RunError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| RunError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| RunError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| RunError::Io(e.to_string()))
}

pub fn from_csv<T: DeserializeOwned>(text: &str) -> Result<Vec<T>, RunError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| RunError::Io(e.to_string()))
}

fn to_json<T: Serialize>(cfg: &RunConfig, result: T) -> Result<String, RunError> {
    let env = Envelope { schema_version: SCHEMA_VERSION, command: cfg.command, config: cfg.clone(), result };
    let mut s = serde_json::to_string_pretty(&env).map_err(|e| RunError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn render<T: Serialize>(cfg: &RunConfig, rows: Vec<T>) -> Result<String, RunError> {
    match cfg.format {
        Format::Csv => to_csv(&rows),
        Format::Json => to_json(cfg, rows),
    }
}

fn eig(cfg: &RunConfig) -> Result<String, RunError> {
    let recs = spectrum::eigenvalues_up_to(&cfg.geometry, cfg.lambda_max)?;
    if let Some(bad) = recs.iter().find(|r| !r.certified) {
        return Err(RunError::Numeric(format!("root k={} j={} r={} failed certification", bad.k, bad.j, bad.r)));
    }
    let rows: Vec<EigenRow> =
        recs.iter().map(|r| EigenRow { k: r.k, j: r.j, r: r.r, lambda: r.lambda, residual: r.residual }).collect();
    render(cfg, rows)
}

fn count(cfg: &RunConfig) -> Result<String, RunError> {
    let rows: Vec<CountReport> = spectrum::weyl_check(&cfg.geometry, &cfg.grid, 1.0)?;
    render(cfg, rows)
}

fn zeta(cfg: &RunConfig) -> Result<String, RunError> {
    let c = zetadet::strip_master_check(&cfg.params(), cfg.s, Truncation { k_max: cfg.k_max, r_max: cfg.r_max })?;
    render(cfg, vec![ZetaRow::from(c)])
}

fn det(cfg: &RunConfig) -> Result<String, RunError> {
    let r = zetadet::logdet(&cfg.params())?;
    match cfg.format {
        Format::Csv => to_csv(&[DetRow::from(&r)]),
        Format::Json => to_json(cfg, r),
    }
}

fn asym(cfg: &RunConfig) -> Result<String, RunError> {
    let regime = match cfg.grid_var {
        GridVar::A => Regime::LargeA,
        GridVar::Mu => Regime::LargeMu,
    };
    let rep = zetadet::residual_report(&cfg.geometry, regime, &cfg.grid, cfg.delta)?;
    match cfg.format {
        Format::Csv => to_csv::<ResidualRow>(&rep.rows),
        Format::Json => to_json(cfg, rep),
    }
}

fn sweep(cfg: &RunConfig) -> Result<String, RunError> {
    let rows: Vec<Result<SweepRow, RunError>> = cfg
        .grid
        .par_iter()
        .map(|&x| {
            let (g, mu) = match cfg.grid_var {
                GridVar::A => (Geometry::new(x, cfg.geometry.alpha)?, cfg.mu),
                GridVar::Mu => (cfg.geometry, x),
            };
            let r = zetadet::logdet(&SpectralZetaParams::new(g, mu, cfg.delta)?)?;
            Ok(SweepRow {
                a: g.a,
                alpha: g.alpha,
                mu,
                delta: cfg.delta,
                logdet: r.logdet,
                numeric_remainder: r.numeric_remainder,
                est_error: r.est_error,
                route_difference: r.diagnostics.route_difference,
            })
        })
        .collect();
    render(cfg, rows.into_iter().collect::<Result<Vec<_>, _>>()?)
}

/// Renders the check table; the flag is true iff every row passes.
pub fn verify_table(selector: Selector, quick: bool, format: Format, cfg: Option<&RunConfig>) -> Result<(String, bool), RunError> {
    let rows = checks::module_checks(selector, quick)?;
    let ok = rows.iter().all(|r| r.pass);
    let text = match (format, cfg) {
        (Format::Json, Some(cfg)) => to_json(cfg, &rows)?,
        _ => to_csv::<CheckRow>(&rows)?,
    };
    Ok((text, ok))
}

fn execute(cfg: &RunConfig) -> Result<(String, bool), RunError> {
    match cfg.command {
        Command::Eig => eig(cfg).map(|s| (s, true)),
        Command::Count => count(cfg).map(|s| (s, true)),
        Command::Zeta => zeta(cfg).map(|s| (s, true)),
        Command::Det => det(cfg).map(|s| (s, true)),
        Command::Asym => asym(cfg).map(|s| (s, true)),
        Command::Sweep => sweep(cfg).map(|s| (s, true)),
        Command::Verify => verify_table(cfg.selector.unwrap_or(Selector::All), cfg.quick, cfg.format, Some(cfg)),
    }
}

/// Runs the configured command on a pool of `cfg.parallelism` threads.
pub fn run_config(cfg: &RunConfig) -> Result<(String, bool), RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| RunError::Validation(e.to_string()))?;
    pool.install(|| execute(cfg))
}

/// Full command line entry point; returns the exit status.
pub fn run<I, T>(argv: I, env_precision: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let cfg = match RunConfig::resolve(cli, env_precision) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "invalid input: {e}");
            return EXIT_VALIDATION;
        }
    };
    let (text, ok) = match run_config(&cfg) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return e.exit_code();
        }
    };
    let written = match &cfg.output {
        Some(p) => std::fs::write(p, &text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(m) = written {
        let _ = writeln!(err, "i/o error: {m}");
        return EXIT_VALIDATION;
    }
    if ok {
        EXIT_OK
    } else {
        let _ = writeln!(err, "some checks failed");
        EXIT_VALIDATION
    }
}

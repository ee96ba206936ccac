//! Command-line front end.
//!
//! One command per invocation. Reports are JSON (complex numbers as
//! `{"re", "im"}`) or, for tabular commands, CSV. Exit codes: 0 success,
//! 2 invalid input, 3 solver non-convergence, 4 internal-consistency failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{dual_sup_from, residue_sum, DualProblem, DualResult, DEFAULT_SEARCH_DEGREE};
use crate::error::{Error, Result};
use crate::function::FunctionSpec;
use crate::grid::default_grid_size;
use crate::opa::{conjecture_scan, solve_opa, OpaResult, SolverOptions};
use crate::orthogonality::pythagorean_report;
use crate::projection::{
    distance_formula, finite_blaschke_extremal, multiple_zero_family, project_one, spicyham_check,
    truncation_distance_experiment,
};
use crate::roots::{escape_tracker, lemma_0opa_bound, root_report, write_trajectory_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Optimal polynomial approximant of a given degree.
    Opa,
    /// Metric projection of 1 onto the invariant subspace of f.
    Project,
    /// Explicit extremal for a finite Blaschke product.
    ExtremalFbp,
    /// Distance formula, optionally with a solver estimate.
    Distance,
    /// Dual extremal problem for a finite Blaschke product.
    Dual,
    /// OPA roots and every applicable lower bound.
    Roots,
    /// Pythagorean inequalities for an orthogonal pair.
    Pythag,
    /// Compare ||1 - Jf|| against the best constant multiple of f.
    ScanConjecture,
    /// Root trajectories of OPAs of increasing degree.
    Escape,
    /// Distances for truncated Blaschke products.
    Truncation,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Opa => "opa",
            Command::Project => "project",
            Command::ExtremalFbp => "extremal-fbp",
            Command::Distance => "distance",
            Command::Dual => "dual",
            Command::Roots => "roots",
            Command::Pythag => "pythag",
            Command::ScanConjecture => "scan-conjecture",
            Command::Escape => "escape",
            Command::Truncation => "truncation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Parsed command line.
#[derive(Debug, Clone, Parser)]
#[command(name = "hardy-opa", version, about = "Optimal polynomial approximants in Hardy spaces")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Exponent p in (1, inf).
    #[arg(long)]
    pub p: Option<f64>,
    /// Dual exponent q in (1, inf); `dual` accepts --p instead.
    #[arg(long)]
    pub q: Option<f64>,
    /// Polynomial degree (search degree for `dual`, maximal degree for `escape`).
    #[arg(long)]
    pub degree: Option<usize>,
    /// Quadrature nodes; defaults to $HARDY_OPA_GRID or 4096.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long = "max-iter", default_value_t = 500)]
    pub max_iter: usize,
    /// Function spec: inline JSON or a path to a JSON file.
    #[arg(long)]
    pub input: Option<String>,
    /// Second function for `pythag` (inline JSON or path).
    #[arg(long)]
    pub g: Option<String>,
    /// Comma-separated real zeros, e.g. `0.5,-0.5`.
    #[arg(long, allow_hyphen_values = true)]
    pub zeros: Option<String>,
    /// Comma-separated radii for `escape`.
    #[arg(long)]
    pub radii: Option<String>,
    /// Comma-separated truncation orders for `truncation`.
    #[arg(long = "n-list")]
    pub n_list: Option<String>,
    /// Largest shift in the extremal orthogonality check.
    #[arg(long = "m-max", default_value_t = 20)]
    pub m_max: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for randomized starting points.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Envelope of every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub command: Command,
    pub grid: usize,
    pub result: T,
}

/// Serialized output plus the exit code it should produce.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::Domain(_) => EXIT_INVALID,
        Error::NonConvergence(_) => EXIT_NONCONVERGENCE,
        Error::BranchViolation(_) | Error::OuternessViolation(_) | Error::InternalConsistency(_) => {
            EXIT_INCONSISTENT
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub p: f64,
    pub distance: f64,
    #[serde(with = "crate::wire::complex")]
    pub j_at_zero: Complex64,
    /// Degree-n OPA error, present when `--degree` is given.
    pub opa_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalReport {
    pub extremal: crate::projection::ExtremalFbpSummary,
    pub m_max: usize,
    pub orthogonality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualReport {
    pub q: f64,
    pub p: f64,
    pub search_degree: usize,
    pub sup: DualResult,
    /// `|residue sum|` at the maximizer; absent for repeated zeros.
    pub residue_modulus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootsReport {
    pub opa: OpaResult,
    pub roots: crate::roots::RootReport,
    pub degree_zero: crate::roots::DegreeZeroBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationCommandReport {
    pub generator: crate::projection::TruncationReport,
    pub multiple_zero_family: crate::projection::MultipleZeroFamily,
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| Error::invalid(format!("cannot parse {what} entry '{s}'"))))
        .collect()
}

fn read_json(raw: &str) -> Result<String> {
    let trimmed = raw.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(raw.to_string())
    } else {
        fs::read_to_string(raw).map_err(|e| Error::invalid(format!("cannot read {raw}: {e}")))
    }
}

fn parse_spec(raw: &str) -> Result<FunctionSpec> {
    serde_json::from_str(&read_json(raw)?).map_err(|e| Error::invalid(format!("bad function spec: {e}")))
}

impl RunConfig {
    /// Parses arguments (the first item is the program name).
    pub fn parse_args<I, T>(args: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        RunConfig::try_parse_from(args)
    }

    fn grid_size(&self) -> usize {
        self.grid.unwrap_or_else(default_grid_size)
    }

    fn options(&self) -> SolverOptions {
        SolverOptions::default().with_grid(self.grid_size()).with_tol(self.tol).with_max_iter(self.max_iter)
    }

    fn require_p(&self) -> Result<f64> {
        self.p.ok_or_else(|| Error::invalid(format!("{} needs --p", self.command.name())))
    }

    fn function(&self) -> Result<FunctionSpec> {
        match (&self.input, &self.zeros) {
            (Some(raw), _) => parse_spec(raw),
            (None, Some(_)) => FunctionSpec::blaschke(self.zero_list()?),
            (None, None) => Err(Error::invalid(format!("{} needs --input", self.command.name()))),
        }
    }

    /// Zeros from `--zeros`, or from the Blaschke part of `--input`.
    fn zero_list(&self) -> Result<Vec<Complex64>> {
        if let Some(raw) = &self.zeros {
            if raw.trim_start().starts_with('[') {
                let wire: Vec<crate::wire::WireComplex> = serde_json::from_str(raw)
                    .map_err(|e| Error::invalid(format!("bad zero list: {e}")))?;
                return Ok(wire.into_iter().map(Into::into).collect());
            }
            let reals: Vec<f64> = parse_list(raw, "zero")?;
            return Ok(reals.into_iter().map(|x| Complex64::new(x, 0.0)).collect());
        }
        if let Some(raw) = &self.input {
            let f = parse_spec(raw)?;
            if let Some(b) = f.blaschke_part() {
                return Ok(b.zeros().to_vec());
            }
        }
        Err(Error::invalid(format!("{} needs --zeros", self.command.name())))
    }
}

fn envelope<T: Serialize>(cfg: &RunConfig, result: &T) -> Result<String> {
    let report = Report { command: cfg.command, grid: cfg.grid_size(), result };
    serde_json::to_string_pretty(&report)
        .map(|s| s + "\n")
        .map_err(|e| Error::InternalConsistency(format!("serialization failed: {e}")))
}

fn csv_unsupported(cfg: &RunConfig) -> Error {
    Error::invalid(format!("csv output is not available for {}", cfg.command.name()))
}

fn csv_string<F>(fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> csv::Result<()>,
{
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        fill(&mut w).map_err(|e| Error::invalid(format!("csv: {e}")))?;
        w.flush().map_err(|e| Error::invalid(format!("csv: {e}")))?;
    }
    String::from_utf8(buf).map_err(|e| Error::InternalConsistency(e.to_string()))
}

fn ok(output: String) -> Outcome {
    Outcome { output, exit_code: EXIT_OK }
}

/// Runs one command and returns its serialized report.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let opts = cfg.options();
    opts.validate()?;
    let json = cfg.format == Format::Json;
    match cfg.command {
        Command::Opa => {
            let f = cfg.function()?;
            let p = cfg.require_p()?;
            let r = solve_opa(&f, cfg.degree.unwrap_or(0), p, &opts)?;
            let code = if r.converged { EXIT_OK } else { EXIT_NONCONVERGENCE };
            let output = if json {
                envelope(cfg, &r)?
            } else {
                csv_string(|w| {
                    w.write_record(["k", "re", "im"])?;
                    for (k, c) in r.coefficients.iter().enumerate() {
                        w.write_record([k.to_string(), c.re.to_string(), c.im.to_string()])?;
                    }
                    Ok(())
                })?
            };
            Ok(Outcome { output, exit_code: code })
        }
        Command::Project => {
            let f = cfg.function()?;
            let p = cfg.require_p()?;
            if !json {
                return Err(csv_unsupported(cfg));
            }
            let r = project_one(&f, p, &opts.grid()?)?;
            Ok(ok(envelope(cfg, &r.summary())?))
        }
        Command::ExtremalFbp => {
            let p = cfg.require_p()?;
            if !json {
                return Err(csv_unsupported(cfg));
            }
            let zeros = cfg.zero_list()?;
            let r = finite_blaschke_extremal(&zeros, p, &opts.grid()?)?;
            let orthogonality = spicyham_check(&r, cfg.m_max)?;
            let report = ExtremalReport { extremal: r.summary(), m_max: cfg.m_max, orthogonality };
            Ok(ok(envelope(cfg, &report)?))
        }
        Command::Distance => {
            let f = cfg.function()?;
            let p = cfg.require_p()?;
            if !json {
                return Err(csv_unsupported(cfg));
            }
            let mut code = EXIT_OK;
            let opa_error = match cfg.degree {
                Some(n) => {
                    let r = solve_opa(&f, n, p, &opts)?;
                    if !r.converged {
                        code = EXIT_NONCONVERGENCE;
                    }
                    Some(r.error)
                }
                None => None,
            };
            let report =
                DistanceReport { p, distance: distance_formula(&f, p)?, j_at_zero: f.inner_at_zero(), opa_error };
            Ok(Outcome { output: envelope(cfg, &report)?, exit_code: code })
        }
        Command::Dual => {
            let q = match (cfg.q, cfg.p) {
                (Some(q), _) => q,
                (None, Some(p)) if p > 1.0 => p / (p - 1.0),
                _ => return Err(Error::invalid("dual needs --q (or --p)")),
            };
            if !json {
                return Err(csv_unsupported(cfg));
            }
            let zeros = cfg.zero_list()?;
            let m = cfg.degree.unwrap_or(DEFAULT_SEARCH_DEGREE).max(zeros.len());
            let prob = DualProblem::contour_only(zeros.clone(), q, m)?;
            let start: Option<Vec<Complex64>> = cfg.seed.map(|seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..=m).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
            });
            let sup = dual_sup_from(&prob, &opts, start.as_deref())?;
            let residue_modulus = match DualProblem::new(zeros, q, m) {
                Ok(distinct) => Some(residue_sum(&distinct, &FunctionSpec::polynomial(sup.maximizer.clone())?)?.norm()),
                Err(_) => None,
            };
            let code = if sup.converged { EXIT_OK } else { EXIT_NONCONVERGENCE };
            let report = DualReport { q, p: prob.p(), search_degree: m, sup, residue_modulus };
            Ok(Outcome { output: envelope(cfg, &report)?, exit_code: code })
        }
        Command::Roots => {
            let f = cfg.function()?;
            let p = cfg.require_p()?;
            let grid = opts.grid()?;
            let opa = solve_opa(&f, cfg.degree.unwrap_or(0), p, &opts)?;
            let roots = root_report(&f, &opa, p, &grid)?;
            let code = if opa.converged { EXIT_OK } else { EXIT_NONCONVERGENCE };
            let output = if json {
                let degree_zero = lemma_0opa_bound(&f, p, &grid)?;
                envelope(cfg, &RootsReport { opa, roots, degree_zero })?
            } else {
                csv_string(|w| {
                    w.write_record(["root_re", "root_im", "modulus", "in_disk"])?;
                    for z in &roots.roots {
                        let in_disk = roots.in_disk.contains(z);
                        w.write_record([z.re.to_string(), z.im.to_string(), z.norm().to_string(), in_disk.to_string()])?;
                    }
                    Ok(())
                })?
            };
            Ok(Outcome { output, exit_code: code })
        }
        Command::Pythag => {
            let p = cfg.require_p()?;
            if !json {
                return Err(csv_unsupported(cfg));
            }
            let grid = opts.grid()?;
            let f = match &cfg.input {
                Some(raw) => parse_spec(raw)?,
                None => FunctionSpec::one(),
            };
            let g = match &cfg.g {
                Some(raw) => parse_spec(raw)?,
                None => return Err(Error::invalid("pythag needs --g")),
            };
            let report = pythagorean_report(&f.sample(&grid)?, &g.sample(&grid)?, p, cfg.tol)?;
            Ok(ok(envelope(cfg, &report)?))
        }
        Command::ScanConjecture => {
            let f = cfg.function_for_scan()?;
            let p = cfg.require_p()?;
            if cfg.zeros.is_none() {
                return Err(Error::invalid("scan-conjecture needs --zeros for the inner family"));
            }
            let family: Vec<FunctionSpec> = cfg
                .zero_list()?
                .into_iter()
                .map(|a| FunctionSpec::blaschke(vec![a]))
                .collect::<Result<_>>()?;
            let entries = conjecture_scan(&f, &family, p, &opts)?;
            let output = if json {
                envelope(cfg, &entries)?
            } else {
                csv_string(|w| {
                    w.write_record(["index", "lhs", "rhs", "margin", "rhs_unimodular", "margin_unimodular", "counterexample"])?;
                    for e in &entries {
                        w.write_record([
                            e.index.to_string(),
                            e.lhs.to_string(),
                            e.rhs.to_string(),
                            e.margin.to_string(),
                            e.rhs_unimodular.to_string(),
                            e.margin_unimodular.to_string(),
                            e.counterexample.to_string(),
                        ])?;
                    }
                    Ok(())
                })?
            };
            Ok(ok(output))
        }
        Command::Escape => {
            let f = cfg.function()?;
            let p = cfg.require_p()?;
            let radii: Vec<f64> = match &cfg.radii {
                Some(raw) => parse_list(raw, "radius")?,
                None => vec![0.5, 0.9, 0.99],
            };
            let report = escape_tracker(&f, p, cfg.degree.unwrap_or(12), &radii, &opts)?;
            let code = if report.steps.iter().all(|s| s.converged) { EXIT_OK } else { EXIT_NONCONVERGENCE };
            let output = if json {
                envelope(cfg, &report)?
            } else {
                let mut buf = Vec::new();
                write_trajectory_csv(&report.trajectory, &mut buf)?;
                String::from_utf8(buf).map_err(|e| Error::InternalConsistency(e.to_string()))?
            };
            Ok(Outcome { output, exit_code: code })
        }
        Command::Truncation => {
            let p = cfg.require_p()?;
            let explicit = match &cfg.zeros {
                Some(_) => Some(cfg.zero_list()?),
                None => None,
            };
            let n_list: Vec<usize> = match (&cfg.n_list, &explicit) {
                (Some(raw), _) => parse_list(raw, "order")?,
                (None, Some(z)) => (0..=z.len()).collect(),
                (None, None) => (0..=10).collect(),
            };
            let generator = |k: usize| match &explicit {
                Some(z) => z.get(k - 1).copied().unwrap_or(Complex64::new(f64::NAN, 0.0)),
                None => Complex64::new(1.0 - 0.5f64.powi(k as i32), 0.0),
            };
            if let Some(z) = &explicit {
                if let Some(&n) = n_list.iter().find(|&&n| n > z.len()) {
                    return Err(Error::invalid(format!("order {n} exceeds the {} given zeros", z.len())));
                }
            }
            let rows = truncation_distance_experiment(generator, p, &n_list)?;
            let output = if json {
                let family = multiple_zero_family(p, &[2, 3, 4, 5, 8, 16, 32])?;
                envelope(cfg, &TruncationCommandReport { generator: rows, multiple_zero_family: family })?
            } else {
                csv_string(|w| {
                    w.write_record(["n", "j_at_zero_modulus", "distance"])?;
                    for r in &rows.rows {
                        w.write_record([r.n.to_string(), r.j_at_zero_modulus.to_string(), r.distance.to_string()])?;
                    }
                    Ok(())
                })?
            };
            Ok(ok(output))
        }
    }
}

impl RunConfig {
    fn function_for_scan(&self) -> Result<FunctionSpec> {
        match &self.input {
            Some(raw) => parse_spec(raw),
            None => Err(Error::invalid("scan-conjecture needs --input for f")),
        }
    }
}

/// Parses `args`, runs the command, writes the report to `--out` or `stdout`
/// and any error as one `kind: detail` line to `stderr`. Returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::parse_args(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("bad arguments").trim_start_matches("error: ");
            let _ = writeln!(stderr, "invalid-argument: {first}");
            return EXIT_INVALID;
        }
    };
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            return exit_code(&e);
        }
    };
    let written = match &cfg.out {
        Some(path) => fs::write(path, &outcome.output).map_err(|e| e.to_string()),
        None => stdout.write_all(outcome.output.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "invalid-argument: cannot write report: {e}");
        return EXIT_INVALID;
    }
    outcome.exit_code
}

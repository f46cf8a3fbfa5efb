//! The `cle-radii` command line.
//!
//! Every command writes a table: a `#`-prefixed JSON [`RunManifest`] line,
//! optional `#`-prefixed summary lines, a CSV header and rows. With
//! `--format json` the same content is one JSON object with the rows as
//! arrays. `verify` always writes a JSON report.
//!
//! Exit status: 0 when every gate passes, 2 when a statistical gate fails,
//! 3 on usage, domain or file errors. The worker count comes from
//! `CLE_RADII_WORKERS` and never changes the output.

pub mod verify;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::diffusion::{self, io as sample_io, ExitSample, Scheme, SimConfig, SimError, RNG_VERSION};
use crate::gasket::{self, GasketError};
use crate::lawlib::{self, LawError};
use crate::martingales::MartingaleParams;
use crate::stats::EmpiricalLaw;
use crate::{Kappa, KappaError};

pub use verify::{verify_law, VerifyReport};

pub const WORKERS_ENV: &str = "CLE_RADII_WORKERS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_GATE_FAILED: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Kappa(#[from] KappaError),
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Gasket(#[from] GasketError),
    #[error(transparent)]
    SampleFile(#[from] sample_io::SampleFileError),
    #[error("manifest mismatch: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "cle-radii", version, about = "Laws of nested CLE conformal radii: closed forms and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawWhat {
    Density,
    Cdf,
    Mgf,
    Mean,
    Alpha,
    Dimension,
    Abscissa,
    ThicknessMgf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GasketMode {
    Survival,
    Covering,
    Nested,
}

#[derive(Debug, clap::Args)]
pub struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, clap::Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = diffusion::DEFAULT_DT_MAX)]
    pub dt_max: f64,
    #[arg(long, default_value_t = diffusion::DEFAULT_DT_FLOOR)]
    pub dt_floor: f64,
    /// Censoring horizon; defaults to 10⁴ mean exit times.
    #[arg(long)]
    pub max_time: Option<f64>,
    #[arg(long, default_value = "split")]
    pub scheme: Scheme,
    /// `c` in the adaptive-euler step `c·dist²`.
    #[arg(long, default_value_t = diffusion::EULER_STEP_CONSTANT)]
    pub euler_c: f64,
}

impl SimArgs {
    fn config(&self, kappa: Kappa, theta0: f64) -> SimConfig {
        let mut cfg = SimConfig::new(kappa)
            .with_theta0(theta0)
            .with_seed(self.seed)
            .with_dt_max(self.dt_max)
            .with_dt_floor(self.dt_floor)
            .with_euler_step_constant(self.euler_c)
            .with_scheme(self.scheme);
        if let Some(t) = self.max_time {
            cfg = cfg.with_max_time(t);
        }
        cfg
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the closed-form law of the log-conformal-radius decrement.
    Law {
        #[arg(long)]
        kappa: f64,
        #[arg(long, value_enum)]
        what: LawWhat,
        /// Single λ for mgf and thickness-mgf; overrides --grid.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        /// `start:stop:steps` over x (density, cdf) or λ (mgf, thickness-mgf).
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulate exit times of the diffusion started at θ0.
    Simulate {
        #[arg(long)]
        kappa: f64,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta0: f64,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Test a sample file against the closed-form law.
    Verify {
        /// Sample file written by `simulate`.
        file: PathBuf,
        /// Law to test against; defaults to the κ in the manifest.
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Gasket exponent estimates.
    Gasket {
        #[arg(long)]
        kappa: f64,
        #[arg(long, value_enum)]
        mode: GasketMode,
        /// Paths (survival) or sequences (nested).
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        /// survival: `start:stop:steps` over s; covering: over log₂(1/ε).
        #[arg(long)]
        grid: Option<String>,
        /// Loops per nested sequence.
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo constancy check of the stopped martingale e^{λt}M(θ_t).
    Martingale {
        #[arg(long)]
        kappa: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta0: f64,
        /// Checkpoint times `start:stop:steps`.
        #[arg(long, default_value = "0:20:5")]
        grid: String,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// Header of every output: enough to rerun the command and to check that a
/// file was produced by it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub rng_version: String,
    pub seed: Option<u64>,
    pub software_version: String,
    pub duration_seconds: f64,
    /// SHA-256 of the simulation configuration, for sample files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digest: Option<String>,
}

impl RunManifest {
    fn new(command: &str, parameters: Value, seed: Option<u64>) -> Self {
        let parameters = match parameters {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        Self {
            command: command.into(),
            parameters,
            rng_version: RNG_VERSION.into(),
            seed,
            software_version: env!("CARGO_PKG_VERSION").into(),
            duration_seconds: 0.0,
            digest: None,
        }
    }
}

/// Rows plus the summary lines that go above them.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Map<String, Value>,
    pub pass: bool,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), pass: true, ..Default::default() }
    }
}

/// Parse `start:stop:steps` into `steps` evenly spaced points.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("grid must be start:stop:steps, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if steps == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    let h = (stop - start) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i == steps - 1 { stop } else { start + h * i as f64 }).collect())
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn kappa_arg(v: f64) -> Result<Kappa, CliError> {
    Ok(Kappa::new(v)?)
}

fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok().and_then(|s| s.trim().parse().ok()).filter(|&w| w > 0)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(f) if !n.is_i64() && !n.is_u64() => format!("{f:?}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn write_table<W: Write>(mut w: W, manifest: &RunManifest, table: &Table, format: Format) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(w, "#{}", serde_json::to_string(manifest).map_err(io::Error::other)?)?;
            if !table.summary.is_empty() {
                writeln!(w, "#{}", Value::Object(table.summary.clone()))?;
            }
            writeln!(w, "{}", table.columns.join(","))?;
            for r in &table.rows {
                let line: Vec<String> = r.iter().map(cell).collect();
                writeln!(w, "{}", line.join(","))?;
            }
        }
        Format::Json => {
            let mut obj = json!({
                "manifest": manifest,
                "columns": table.columns,
                "rows": table.rows,
            });
            if !table.summary.is_empty() {
                obj["summary"] = Value::Object(table.summary.clone());
            }
            serde_json::to_writer(&mut w, &obj).map_err(io::Error::other)?;
            writeln!(w)?;
        }
    }
    w.flush()
}

fn emit(out: &mut dyn Write, path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()
        }
        None => f(out),
    }
}

fn law_table(kappa: Kappa, what: LawWhat, lambda: Option<f64>, grid: Option<&str>) -> Result<Table, CliError> {
    let mut t = Table::new(&["argument", "value", "error_bound"]);
    let round = |v: f64| 4.0 * f64::EPSILON * v.abs();
    let points = |default: &str| -> Result<Vec<f64>, CliError> {
        match (lambda, grid) {
            (Some(l), _) if matches!(what, LawWhat::Mgf | LawWhat::ThicknessMgf) => Ok(vec![l]),
            (_, Some(g)) => parse_grid(g),
            _ => parse_grid(default),
        }
    };
    match what {
        LawWhat::Density => {
            for x in points("0.5:20:40")? {
                let v = lawlib::density_b(kappa, x)?;
                t.rows.push(vec![num(x), num(v.re()), num(v.error_bound)]);
            }
        }
        LawWhat::Cdf => {
            for x in points("0.5:20:40")? {
                let v = lawlib::cdf_b(kappa, x)?;
                t.rows.push(vec![num(x), num(v), num(1e-12)]);
            }
        }
        LawWhat::Mgf | LawWhat::ThicknessMgf => {
            for l in points("-2:0:5")? {
                let z = Complex64::new(l, 0.0);
                let v = if what == LawWhat::Mgf { lawlib::mgf_b(kappa, z)? } else { lawlib::thickness_mgf(kappa, z)? };
                t.rows.push(vec![num(l), num(v.re), num(round(v.re))]);
            }
        }
        LawWhat::Mean | LawWhat::Alpha | LawWhat::Dimension | LawWhat::Abscissa => {
            let g = lawlib::gasket_exponents(kappa);
            let v = match what {
                LawWhat::Mean => lawlib::mean_b(kappa),
                LawWhat::Alpha => g.alpha,
                LawWhat::Dimension => g.expectation_dimension,
                _ => lawlib::mgf_abscissa(kappa),
            };
            t.rows.push(vec![num(kappa.value()), num(v), num(round(v))]);
        }
    }
    Ok(t)
}

fn sim_parameters(cfg: &SimConfig, n: usize) -> Value {
    json!({
        "kappa": cfg.kappa.value(),
        "n": n,
        "theta0": cfg.theta0,
        "dt_max": cfg.dt_max,
        "dt_floor": cfg.dt_floor,
        "euler_c": cfg.euler_step_constant,
        "max_time": cfg.max_time,
        "scheme": cfg.scheme.to_string(),
    })
}

/// Rebuild the configuration a sample file claims to come from and check
/// it against the file.
fn config_from_manifest(m: &RunManifest, samples: &[ExitSample]) -> Result<(SimConfig, usize), CliError> {
    let bad = |s: String| CliError::Manifest(s);
    if m.command != "simulate" {
        return Err(bad(format!("expected a simulate manifest, found command {:?}", m.command)));
    }
    if m.rng_version != RNG_VERSION {
        return Err(bad(format!("rng_version {:?} differs from {RNG_VERSION:?}", m.rng_version)));
    }
    let p = &m.parameters;
    let f = |k: &str| p.get(k).and_then(Value::as_f64).ok_or_else(|| bad(format!("missing parameter {k}")));
    let kappa = Kappa::new(f("kappa")?).map_err(|e| bad(e.to_string()))?;
    let n = p.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing parameter n".into()))? as usize;
    let scheme: Scheme = p
        .get("scheme")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("missing parameter scheme".into()))?
        .parse()
        .map_err(bad)?;
    let seed = m.seed.ok_or_else(|| bad("missing seed".into()))?;
    let cfg = SimConfig::new(kappa)
        .with_theta0(f("theta0")?)
        .with_dt_max(f("dt_max")?)
        .with_dt_floor(f("dt_floor")?)
        .with_euler_step_constant(f("euler_c")?)
        .with_max_time(f("max_time")?)
        .with_scheme(scheme)
        .with_seed(seed);
    if m.digest.as_deref() != Some(cfg.digest(n).as_str()) {
        return Err(bad("digest does not match the parameters".into()));
    }
    if samples.is_empty() {
        return Err(bad("file holds no samples".into()));
    }
    if samples.len() > n || samples.iter().enumerate().any(|(i, s)| i > 0 && s.seed_index <= samples[i - 1].seed_index) {
        return Err(bad(format!("{} rows do not form a subset of streams 0..{n}", samples.len())));
    }
    if samples.last().is_some_and(|s| s.seed_index as usize >= n) {
        return Err(bad(format!("seed_index beyond n = {n}")));
    }
    Ok((cfg, n))
}

/// Read a sample file in either output format.
pub fn read_sample_file(path: &Path) -> Result<(RunManifest, Vec<ExitSample>), CliError> {
    let text = std::fs::read_to_string(path)?;
    let (manifest, samples) = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Manifest(e.to_string()))?;
        let rows = v["rows"].as_array().ok_or_else(|| CliError::Manifest("no rows".into()))?;
        let samples = rows
            .iter()
            .map(|r| serde_json::from_value::<(u64, f64, i8, u64)>(r.clone()))
            .map(|r| {
                r.map(|(seed_index, exit_time, exit_side, steps)| ExitSample { seed_index, exit_time, exit_side, steps })
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Manifest(e.to_string()))?;
        (v["manifest"].clone(), samples)
    } else {
        sample_io::read_exit_csv(BufReader::new(text.as_bytes()))?
    };
    let manifest: RunManifest = serde_json::from_value(manifest).map_err(|e| CliError::Manifest(e.to_string()))?;
    Ok((manifest, samples))
}

fn gasket_table(
    kappa: Kappa,
    mode: GasketMode,
    n: usize,
    grid: Option<&str>,
    depth: usize,
    cfg: &SimConfig,
    workers: Option<usize>,
) -> Result<Table, CliError> {
    let alpha = lawlib::gasket_exponents(kappa).alpha;
    match mode {
        GasketMode::Survival => {
            let grid = parse_grid(grid.unwrap_or("5:60:12"))?;
            let curve = gasket::survival_curve(cfg, &grid, n, workers)?;
            let mut t = Table::new(&["s", "estimate", "std_error", "survivors", "closed_form", "degenerate"]);
            for p in &curve.points {
                t.rows.push(vec![
                    num(p.s),
                    num(p.estimate),
                    num(p.std_error),
                    json!(p.survivors),
                    num(p.closed_form),
                    json!(p.degenerate),
                ]);
            }
            t.summary.insert("target_slope".into(), num(-alpha));
            t.summary.insert("degenerate_points".into(), json!(curve.points.iter().filter(|p| p.degenerate).count()));
            match curve.fit {
                Some(f) => {
                    t.pass = (f.slope / -alpha - 1.0).abs() < verify::TAIL_RELATIVE_TOLERANCE;
                    t.summary.insert("slope".into(), num(f.slope));
                    t.summary.insert("slope_std_error".into(), num(f.std_error));
                    t.summary.insert("fit_points".into(), json!(f.points));
                }
                None => {
                    t.pass = false;
                    t.summary.insert("insufficient_survivals".into(), json!(true));
                }
            }
            t.summary.insert("pass".into(), json!(t.pass));
            Ok(t)
        }
        GasketMode::Covering => {
            let grid = parse_grid(grid.unwrap_or("6:14:9"))?;
            let eps: Vec<f64> = grid.iter().map(|k| 2f64.powf(-k)).collect();
            let mut t = Table::new(&["epsilon", "count"]);
            for &e in &eps {
                t.rows.push(vec![num(e), num(gasket::covering_count(kappa, e)?)]);
            }
            let f = gasket::covering_exponent(kappa, &eps)?;
            t.pass = (f.slope - (alpha - 2.0)).abs() < 0.02;
            t.summary.insert("slope".into(), num(f.slope));
            t.summary.insert("slope_std_error".into(), num(f.std_error));
            t.summary.insert("target_slope".into(), num(alpha - 2.0));
            t.summary.insert("pass".into(), json!(t.pass));
            Ok(t)
        }
        GasketMode::Nested => {
            let seqs = gasket::sample_nested_many(cfg, depth, n, workers)?;
            let mut t = Table::new(&["sequence", "level", "log_cr", "increment"]);
            for (j, s) in seqs.iter().enumerate() {
                for (i, b) in s.increments.iter().enumerate() {
                    t.rows.push(vec![json!(j), json!(i + 1), num(s.log_cr[i + 1]), num(*b)]);
                }
            }
            Ok(t)
        }
    }
}

fn martingale_table(
    kappa: Kappa,
    lambda: f64,
    checkpoints: &[f64],
    n: usize,
    cfg: &SimConfig,
    workers: Option<usize>,
) -> Result<Table, CliError> {
    let l = Complex64::new(lambda, 0.0);
    let start = MartingaleParams::even(kappa, lambda)
        .eval(diffusion::lift_fold(cfg.theta0))
        .map_err(SimError::from)?;
    let est = diffusion::path_functional_martingale(cfg, l, checkpoints, n, workers)?;
    let mut t = Table::new(&["t", "mean_re", "mean_im", "std_error", "z"]);
    let mut worst: f64 = 0.0;
    for e in &est {
        // summation rounding alone is not a deviation
        let dev = (e.mean - start).norm();
        let rounding = 1e-10 * start.norm().max(1.0);
        let z = if dev <= rounding { 0.0 } else { dev / e.std_error };
        worst = worst.max(z);
        t.rows.push(vec![num(e.t), num(e.mean.re), num(e.mean.im), num(e.std_error), num(z)]);
    }
    t.pass = worst <= 3.0;
    t.summary.insert("start_value".into(), json!([start.re, start.im]));
    t.summary.insert("max_abs_z".into(), num(worst));
    t.summary.insert("pass".into(), json!(t.pass));
    Ok(t)
}

/// Run one command; returns the process exit status.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let started = Instant::now();
    let workers = workers_from_env();
    let finish = |mut m: RunManifest| {
        m.duration_seconds = started.elapsed().as_secs_f64();
        m
    };
    let status = |pass: bool| if pass { EXIT_PASS } else { EXIT_GATE_FAILED };
    match cli.command {
        Command::Law { kappa, what, lambda, grid, out: o } => {
            let k = kappa_arg(kappa)?;
            let t = law_table(k, what, lambda, grid.as_deref())?;
            let m = finish(RunManifest::new(
                "law",
                json!({"kappa": kappa, "what": what, "lambda": lambda, "grid": grid}),
                None,
            ));
            emit(out, o.output.as_deref(), |w| write_table(w, &m, &t, o.format))?;
            Ok(EXIT_PASS)
        }
        Command::Simulate { kappa, n, theta0, sim, out: o } => {
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let cfg = sim.config(kappa_arg(kappa)?, theta0);
            let batch = diffusion::sample_exit_batch_with_workers(&cfg, n, workers)?;
            let mut m = RunManifest::new("simulate", sim_parameters(&cfg, n), Some(cfg.seed));
            m.digest = Some(cfg.digest(n));
            let m = finish(m);
            emit(out, o.output.as_deref(), |w| match o.format {
                Format::Csv => {
                    sample_io::write_exit_csv(w, &serde_json::to_value(&m).map_err(io::Error::other)?, &batch.samples)
                }
                Format::Json => {
                    let mut t = Table::new(&["seed_index", "exit_time", "exit_side", "steps"]);
                    t.rows = batch
                        .samples
                        .iter()
                        .map(|s| vec![json!(s.seed_index), num(s.exit_time), json!(s.exit_side), json!(s.steps)])
                        .collect();
                    write_table(w, &m, &t, Format::Json)
                }
            })?;
            Ok(EXIT_PASS)
        }
        Command::Verify { file, kappa, output } => {
            let (source, samples) = read_sample_file(&file)?;
            let (cfg, _) = config_from_manifest(&source, &samples)?;
            let k = match kappa {
                Some(v) => kappa_arg(v)?,
                None => cfg.kappa,
            };
            let law = EmpiricalLaw::new(samples.iter().map(|s| s.exit_time).collect(), source.digest.clone().unwrap_or_default())
                .map_err(|e| CliError::Manifest(e.to_string()))?;
            let report = verify_law(k, &law)?;
            let m = finish(RunManifest::new(
                "verify",
                json!({"file": file, "kappa": k.value(), "source_digest": source.digest}),
                source.seed,
            ));
            let doc = json!({"manifest": m, "report": report});
            emit(out, output.as_deref(), |w| {
                serde_json::to_writer_pretty(&mut *w, &doc).map_err(io::Error::other)?;
                writeln!(w)
            })?;
            Ok(status(report.pass))
        }
        Command::Gasket { kappa, mode, n, grid, depth, sim, out: o } => {
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let k = kappa_arg(kappa)?;
            let cfg = sim.config(k, 0.0);
            let t = gasket_table(k, mode, n, grid.as_deref(), depth, &cfg, workers)?;
            let mut params = sim_parameters(&cfg, n);
            params["mode"] = json!(mode);
            params["grid"] = json!(grid);
            params["depth"] = json!(depth);
            let m = finish(RunManifest::new("gasket", params, Some(cfg.seed)));
            emit(out, o.output.as_deref(), |w| write_table(w, &m, &t, o.format))?;
            Ok(status(t.pass))
        }
        Command::Martingale { kappa, lambda, theta0, grid, n, sim, out: o } => {
            if lambda > 0.0 {
                return Err(CliError::Usage(format!("--lambda must be ≤ 0, got {lambda}")));
            }
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let k = kappa_arg(kappa)?;
            let cfg = sim.config(k, theta0);
            let checkpoints = parse_grid(&grid)?;
            let t = martingale_table(k, lambda, &checkpoints, n, &cfg, workers)?;
            let mut params = sim_parameters(&cfg, n);
            params["lambda"] = json!(lambda);
            params["grid"] = json!(grid);
            let m = finish(RunManifest::new("martingale", params, Some(cfg.seed)));
            emit(out, o.output.as_deref(), |w| write_table(w, &m, &t, o.format))?;
            Ok(status(t.pass))
        }
    }
}

/// Parse `args` (program name first), run, and map errors to exit codes.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match run(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("-2:0:1").unwrap(), vec![-2.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("a:1:2").is_err());
    }

    #[test]
    fn float_cells_round_trip() {
        let x = 0.1 + 0.2;
        assert_eq!(cell(&num(x)).parse::<f64>().unwrap(), x);
        assert_eq!(cell(&json!(7)), "7");
    }
}

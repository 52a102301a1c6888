//! Command-line front end: CSV ingestion, fitting, model comparison,
//! sampling, density tables and JSON reports.
//!
//! [`run`] does all the work and returns a [`CliError`] carrying the exit
//! code, so the binary and in-process callers behave identically.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use bimodal::constructors::{family_parameters, registry_family, FAMILY_NAMES};
use bimodal::density::DensityModel;
use bimodal::fit::{compare, fit_config, fit_ml, ks_test, Dataset, FitReport, Model};
use bimodal::rng::RngStream;
use clap::{Args, Parser, Subcommand};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failure categories, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Ingest(String),
    #[error("{0}")]
    Fit(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Ingest(_) => 3,
            CliError::Fit(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Ingest(_) => "ingest",
            CliError::Fit(_) => "fit",
        }
    }

    /// Single-line `error[kind]: message` form written to standard error.
    pub fn line(&self) -> String {
        format!("error[{}]: {}", self.kind(), self.to_string().replace(['\n', '\r'], " "))
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "bimodal", version, about = "Fit, compare, sample and tabulate bimodal-unimodal distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximum-likelihood fit of one model to a single-column CSV.
    Fit(FitArgs),
    /// Fit several models and rank them by AIC.
    Compare(FitArgs),
    /// Draw random variates, one per line.
    Sample(SampleArgs),
    /// Tabulate x,pdf,cdf on a grid.
    Pdf(PdfArgs),
    /// Kolmogorov-Smirnov test of data against a fully specified model.
    Ks(KsArgs),
    /// Tabulate x,pdf,cdf of a registered constructor family.
    Construct(ConstructArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Model name; comma-separated list for `compare`.
    #[arg(long)]
    pub model: String,
    /// Single-column CSV of observations; a header line is optional.
    #[arg(long)]
    pub input: PathBuf,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed for every random stream the command uses.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Total optimizer starts beyond the built-in grid, plus one.
    #[arg(long, default_value_t = 1)]
    pub starts: usize,
    /// Omit the run-dependent `meta` block.
    #[arg(long)]
    pub no_meta: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Model name (bun, bun-sym, bust, bust-sym, bul, bul-sym, logbun).
    #[arg(long)]
    pub model: String,
    /// `name=value` pairs, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub params: String,
    /// Number of draws.
    #[arg(long)]
    pub n: usize,
    /// Seed for every random stream the command uses.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PdfArgs {
    /// Model name (bun, bun-sym, bust, bust-sym, bul, bul-sym, logbun).
    #[arg(long)]
    pub model: String,
    /// `name=value` pairs, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub params: String,
    /// `min,max,points`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KsArgs {
    /// Model name (bun, bun-sym, bust, bust-sym, bul, bul-sym, logbun).
    #[arg(long)]
    pub model: String,
    /// `name=value` pairs, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub params: String,
    /// Single-column CSV of observations; a header line is optional.
    #[arg(long)]
    pub input: PathBuf,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Registered family name.
    #[arg(long)]
    pub family: String,
    /// `name=value` pairs, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub params: String,
    /// `min,max,points`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: String,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command, writing primary
/// output to `out` and the human-readable summary of fits to `info`.
pub fn run<I, S>(args: I, out: &mut dyn Write, info: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write!(out, "{e}").map_err(io_err)?;
                return Ok(());
            }
            let msg = e.to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            return Err(CliError::Usage(first.trim_start_matches("error: ").to_string()));
        }
    };
    match cli.command {
        Command::Fit(a) => cmd_fit(&a, out, info),
        Command::Compare(a) => cmd_compare(&a, out, info),
        Command::Sample(a) => cmd_sample(&a, out),
        Command::Pdf(a) => cmd_pdf(&a, out),
        Command::Ks(a) => cmd_ks(&a, out),
        Command::Construct(a) => cmd_construct(&a, out),
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Ingest(format!("i/o error: {e}"))
}

/// Reads a single numeric column. A first row that does not parse is taken
/// as a header; any other non-numeric row is an error naming its line.
pub fn ingest_csv(path: &Path) -> CliResult<Dataset<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Ingest(format!("cannot read {}: {e}", path.display())))?;
    parse_column(&text, path)
}

pub fn parse_column(text: &str, path: &Path) -> CliResult<Dataset<f64>> {
    let mut values = Vec::new();
    let mut bad: Vec<(usize, String)> = Vec::new();
    let mut first_bad_is_header = false;
    for (i, raw) in text.lines().enumerate() {
        let cell = raw.trim().trim_matches('"').trim();
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            _ => {
                if values.is_empty() && bad.is_empty() {
                    first_bad_is_header = true;
                }
                bad.push((i + 1, cell.to_string()));
            }
        }
    }
    // A leading non-numeric row is a header only if numeric data follows.
    if first_bad_is_header && !values.is_empty() {
        bad.remove(0);
    }
    if !bad.is_empty() {
        let rows: Vec<String> = bad.iter().take(10).map(|(l, c)| format!("row {l} ({c:?})")).collect();
        let more = if bad.len() > 10 { format!(" and {} more", bad.len() - 10) } else { String::new() };
        return Err(CliError::Ingest(format!(
            "{}: non-numeric values at {}{more}",
            path.display(),
            rows.join(", ")
        )));
    }
    if values.is_empty() {
        return Err(CliError::Ingest(format!("{}: no numeric rows", path.display())));
    }
    let name = path.file_stem().map_or("data".to_string(), |s| s.to_string_lossy().into_owned());
    Dataset::new(values, name, path.display().to_string()).map_err(|e| CliError::Ingest(e.to_string()))
}

/// Parses `name=value,name=value`.
pub fn parse_params(spec: &str) -> CliResult<Vec<(String, f64)>> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("parameter {kv:?} is not of the form name=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("parameter {}: {v:?} is not a number", k.trim())))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

/// Parses `min,max,points` with `points >= 2` and `min < max`.
pub fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("grid {spec:?} must be min,max,points with min < max and points >= 2"));
    let [lo, hi, n] = parts.as_slice() else { return Err(bad()) };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi && n >= 2) {
        return Err(bad());
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect())
}

pub fn parse_model(name: &str) -> CliResult<Model> {
    name.trim().parse::<Model>().map_err(|e| CliError::Usage(e.to_string().trim_start_matches("domain error: ").to_string()))
}

/// Formats a float with 17 significant digits; non-finite values become `null`.
pub fn fmt_f64(v: f64) -> String {
    if !v.is_finite() {
        return "null".to_string();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    format!("{v:.16e}")
}

/// JSON number formatter with 17 significant digits.
#[derive(Debug, Clone, Copy, Default)]
pub struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes with 17-digit floats, pretty-printed with two-space indent.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PrettySig::default());
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    let mut s = String::from_utf8(buf).expect("JSON is UTF-8");
    s.push('\n');
    s
}

/// Pretty formatter whose floats go through [`SigDigits`].
#[derive(Debug, Default)]
struct PrettySig {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.inner.$name(w $(, $arg)*)
        })*
    };
}

impl serde_json::ser::Formatter for PrettySig {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        SigDigits.write_f64(w, value)
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        SigDigits.write_f64(w, value as f64)
    }
    forward! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

/// `{"D", "pvalue"}` block of a fit report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsJson {
    #[serde(rename = "D")]
    pub d: f64,
    pub pvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaJson {
    pub runtime_ms: u64,
    pub version: String,
}

/// The JSON form of a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitJson {
    pub model: Model,
    pub n: usize,
    pub estimates: IndexMap<String, f64>,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub ks: KsJson,
    pub converged: bool,
    pub seed: u64,
    pub n_starts_used: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub meta: Option<MetaJson>,
}

impl FitJson {
    pub fn new(r: &FitReport, seed: u64, with_meta: bool) -> Self {
        FitJson {
            model: r.model,
            n: r.n,
            estimates: r.estimates.clone(),
            loglik: r.loglik,
            aic: r.aic,
            bic: r.bic,
            ks: KsJson { d: r.ks_stat, pvalue: r.ks_pvalue },
            converged: r.converged,
            seed,
            n_starts_used: r.n_starts_used,
            meta: with_meta.then(|| MetaJson { runtime_ms: r.runtime_ms, version: VERSION.to_string() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureJson {
    pub model: Model,
    pub error: String,
}

/// The JSON form of a model comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareJson {
    pub ranked: Vec<FitJson>,
    pub failures: Vec<FailureJson>,
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Ingest(format!("cannot write {}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(io_err),
    }
}

fn summary_table(reports: &[FitJson]) -> String {
    let mut s = format!("{:<10} {:>12} {:>10} {:>10} {:>8} {:>8}  estimates\n", "model", "loglik", "AIC", "BIC", "KS D", "p");
    for r in reports {
        let est: Vec<String> = r.estimates.iter().map(|(k, v)| format!("{k}={v:.6}")).collect();
        s += &format!(
            "{:<10} {:>12.4} {:>10.4} {:>10.4} {:>8.4} {:>8.4}  {}\n",
            r.model.name(),
            r.loglik,
            r.aic,
            r.bic,
            r.ks.d,
            r.ks.pvalue,
            est.join(" ")
        );
    }
    s
}

fn optimizer(args: &FitArgs) -> CliResult<bimodal::optimize::OptimizerConfig<f64>> {
    if args.starts == 0 {
        return Err(CliError::Usage("--starts must be at least 1".into()));
    }
    Ok(bimodal::optimize::OptimizerConfig { n_starts: args.starts, seed: args.seed, ..fit_config() })
}

pub fn cmd_fit(args: &FitArgs, out: &mut dyn Write, info: &mut dyn Write) -> CliResult<()> {
    let model = parse_model(&args.model)?;
    let cfg = optimizer(args)?;
    let data = ingest_csv(&args.input)?;
    let report = fit_ml(&data, model, &cfg, &mut RngStream::new(args.seed)).map_err(|e| CliError::Fit(e.to_string()))?;
    let json = FitJson::new(&report, args.seed, !args.no_meta);
    emit(&to_json(&json), args.output.as_deref(), out)?;
    info.write_all(summary_table(&[json]).as_bytes()).map_err(io_err)
}

pub fn cmd_compare(args: &FitArgs, out: &mut dyn Write, info: &mut dyn Write) -> CliResult<()> {
    let models = args.model.split(',').map(parse_model).collect::<CliResult<Vec<_>>>()?;
    if models.len() < 2 {
        return Err(CliError::Usage("compare needs at least two comma-separated models".into()));
    }
    let cfg = optimizer(args)?;
    let data = ingest_csv(&args.input)?;
    let c = compare(&data, &models, &cfg, &RngStream::new(args.seed)).map_err(|e| CliError::Usage(e.to_string()))?;
    if c.ranked.is_empty() {
        let why: Vec<String> = c.failures.iter().map(|f| format!("{}: {}", f.model, f.error)).collect();
        return Err(CliError::Fit(format!("every model failed ({})", why.join("; "))));
    }
    let json = CompareJson {
        ranked: c.ranked.iter().map(|r| FitJson::new(r, args.seed, !args.no_meta)).collect(),
        failures: c.failures.iter().map(|f| FailureJson { model: f.model, error: f.error.to_string() }).collect(),
    };
    emit(&to_json(&json), args.output.as_deref(), out)?;
    let mut table = summary_table(&json.ranked);
    for f in &json.failures {
        table += &format!("{:<10} failed: {}\n", f.model.name(), f.error);
    }
    info.write_all(table.as_bytes()).map_err(io_err)
}

fn model_instance(model: &str, params: &str) -> CliResult<bimodal::fit::ModelInstance<f64>> {
    let m = parse_model(model)?;
    let named = parse_params(params)?;
    m.build_named(&named).map_err(|e| CliError::Usage(e.to_string()))
}

fn table<M: DensityModel<f64> + ?Sized>(d: &M, grid: &[f64]) -> String {
    let mut s = String::from("x,pdf,cdf\n");
    for &x in grid {
        s += &format!("{},{},{}\n", fmt_f64(x), fmt_f64(d.pdf(x)), fmt_f64(d.cdf(x)));
    }
    s
}

pub fn cmd_sample(args: &SampleArgs, out: &mut dyn Write) -> CliResult<()> {
    let d = model_instance(&args.model, &args.params)?;
    let xs = d.sample(args.n, &mut RngStream::new(args.seed));
    let text: String = xs.iter().map(|&x| fmt_f64(x) + "\n").collect();
    emit(&text, args.output.as_deref(), out)
}

pub fn cmd_pdf(args: &PdfArgs, out: &mut dyn Write) -> CliResult<()> {
    let d = model_instance(&args.model, &args.params)?;
    let grid = parse_grid(&args.grid)?;
    emit(&table(&d, &grid), args.output.as_deref(), out)
}

pub fn cmd_ks(args: &KsArgs, out: &mut dyn Write) -> CliResult<()> {
    let d = model_instance(&args.model, &args.params)?;
    let data = ingest_csv(&args.input)?;
    let (stat, p) = ks_test(&data, |x| d.cdf(x));
    emit(&format!("D,pvalue\n{},{}\n", fmt_f64(stat), fmt_f64(p)), args.output.as_deref(), out)
}

pub fn cmd_construct(args: &ConstructArgs, out: &mut dyn Write) -> CliResult<()> {
    let names = family_parameters(&args.family).ok_or_else(|| {
        CliError::Usage(format!("unknown family {:?} (available: {})", args.family, FAMILY_NAMES.join(", ")))
    })?;
    let named = parse_params(&args.params)?;
    if let Some((bad, _)) = named.iter().find(|(k, _)| !names.contains(&k.as_str())) {
        return Err(CliError::Usage(format!("unknown parameter {bad:?} for {} (expected {})", args.family, names.join(", "))));
    }
    let mut values = Vec::with_capacity(names.len());
    for name in names {
        let v = named
            .iter()
            .find(|(k, _)| k == name)
            .ok_or_else(|| CliError::Usage(format!("missing parameter {name:?} for {}", args.family)))?;
        values.push(v.1);
    }
    let fam = registry_family(&args.family, &values).map_err(|e| CliError::Usage(e.to_string()))?;
    let grid = parse_grid(&args.grid)?;
    emit(&table(&fam, &grid), args.output.as_deref(), out)
}

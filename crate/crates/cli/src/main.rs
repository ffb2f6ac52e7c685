//! Command-line front end: suite runs, field evaluation, norms and Bessel tables.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use herglotz::harness::{exit_code, report_emit, run_suites, sample_density, to_markdown, validate_report_json, RunConfig, SuiteId};
use herglotz::norms::{bessel_avg, bessel_i3, hw_a_norm, hw_l_limit, norm_alpha_spectral, sobolev_norm};
use herglotz::sphere::HarmonicSpectrum;
use herglotz::wavefield::extend;

#[derive(Debug, Parser)]
#[command(name = "herglotz", version, about = "Herglotz wave functions: extension, norms and equivalence checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configured verification suites.
    Verify(VerifyArgs),
    /// Evaluate u = E phi at points.
    Eval(EvalArgs),
    /// Sobolev, weighted and Agmon-Hormander norms of a density.
    Norms(NormsArgs),
    /// Table of weighted Bessel averages.
    Bessel(BesselArgs),
    /// Validate a report.json and print its table.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// JSON file mirroring RunConfig; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    dim: Option<Vec<usize>>,
    /// Alpha override for every suite, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha: Option<Vec<f64>>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance override `name=value`, repeatable.
    #[arg(long)]
    tol: Vec<String>,
    /// Suites to run, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    suite: Option<Vec<String>>,
    /// Directory for report.json and report.md.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DensityArgs {
    /// Spectrum JSON; a seeded sample is drawn when absent.
    #[arg(long)]
    spectrum: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 8)]
    degree: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    density: DensityArgs,
    /// JSON array of points, each an array of length d.
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NormsArgs {
    #[command(flatten)]
    density: DensityArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Weight exponent of the A-functional.
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BesselArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,5.5,20")]
    mu: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
    radius: Vec<f64>,
    /// Also tabulate the tail integral I3(mu).
    #[arg(long)]
    i3: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// report.json written by `verify`.
    input: PathBuf,
    /// Write the markdown table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Usage and configuration problems exit 2; verdict failures exit 1.
struct ConfigError(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.into())
    }
}

#[derive(Serialize)]
struct EvalRow {
    x: Vec<f64>,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct NormsRow {
    #[serde(rename = "H_alpha")]
    h_alpha: f64,
    norm_alpha: f64,
    #[serde(rename = "A_norm")]
    a_norm: f64,
    #[serde(rename = "L_limit")]
    l_limit: f64,
}

#[derive(Serialize)]
struct BesselRow {
    mu: f64,
    s: f64,
    radius: f64,
    average: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    i3: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(ConfigError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, ConfigError> {
    match cli.command {
        Command::Verify(a) => verify(a),
        Command::Eval(a) => eval(a).map(|_| 0),
        Command::Norms(a) => norms(a).map(|_| 0),
        Command::Bessel(a) => bessel(a).map(|_| 0),
        Command::Report(a) => report(a),
    }
}

fn build_config(a: &VerifyArgs) -> anyhow::Result<RunConfig> {
    let mut config = match &a.config {
        Some(p) => RunConfig::from_json(&read(p)?)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &a.dim {
        config.dims = d.clone();
    }
    if let Some(al) = &a.alpha {
        config.alphas = Some(al.clone());
    }
    if let Some(n) = a.degree {
        config.max_degree = n;
    }
    if let Some(n) = a.samples {
        config.samples = n;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if let Some(names) = &a.suite {
        config.suites = names.iter().map(|s| SuiteId::parse(s)).collect::<Result<_, _>>()?;
    }
    if !a.tol.is_empty() {
        let mut tol = serde_json::to_value(&config.tolerances)?;
        for kv in &a.tol {
            let (k, v) = kv.split_once('=').with_context(|| format!("--tol expects name=value, got `{kv}`"))?;
            let slot = tol.get_mut(k).with_context(|| format!("unknown tolerance `{k}`"))?;
            let v: f64 = v.parse().with_context(|| format!("tolerance `{k}`: not a number"))?;
            *slot = serde_json::json!(v);
        }
        config.tolerances = serde_json::from_value(tol)?;
    }
    if a.out.is_some() {
        config.out = a.out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn verify(a: VerifyArgs) -> Result<u8, ConfigError> {
    let config = build_config(&a)?;
    let reports = run_suites(&config)?;
    print!("{}", to_markdown(&reports));
    if let Some(dir) = &config.out {
        report_emit(&reports, dir)?;
    }
    let code = exit_code(&reports);
    let failed = reports.iter().filter(|r| !r.verdict.passed()).count();
    eprintln!("{} report(s), {failed} failed", reports.len());
    Ok(code as u8)
}

fn read(p: &Path) -> anyhow::Result<String> {
    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn density(a: &DensityArgs) -> anyhow::Result<HarmonicSpectrum> {
    match &a.spectrum {
        Some(p) => Ok(HarmonicSpectrum::from_json_str(&read(p)?)?),
        None => {
            if a.dim < 2 {
                bail!("dim must be >= 2, got {}", a.dim);
            }
            Ok(sample_density(a.dim, a.degree, a.gamma, a.seed))
        }
    }
}

fn emit(json: String, out: &Option<PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, json + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn eval(a: EvalArgs) -> Result<(), ConfigError> {
    let phi = density(&a.density)?;
    let points: Vec<Vec<f64>> = serde_json::from_str(&read(&a.points)?).context("points: expected [[x1, ..., xd], ...]")?;
    let u = extend(&phi);
    let rows = points
        .into_iter()
        .map(|x| {
            let v = u.eval_point(&x)?;
            Ok(EvalRow { x, re: v.re, im: v.im })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    emit(serde_json::to_string_pretty(&rows)?, &a.out)?;
    Ok(())
}

fn norms(a: NormsArgs) -> Result<(), ConfigError> {
    let phi = density(&a.density)?;
    let u = extend(&phi);
    let row = NormsRow {
        h_alpha: sobolev_norm(&phi, a.alpha),
        norm_alpha: norm_alpha_spectral(&u, a.alpha),
        a_norm: hw_a_norm(&u, a.s)?,
        l_limit: hw_l_limit(&u),
    };
    emit(serde_json::to_string_pretty(&row)?, &a.out)?;
    Ok(())
}

fn bessel(a: BesselArgs) -> Result<(), ConfigError> {
    let mut rows = Vec::new();
    for &mu in &a.mu {
        let i3 = if a.i3 { Some(bessel_i3(mu)?) } else { None };
        for &radius in &a.radius {
            rows.push(BesselRow { mu, s: a.s, radius, average: bessel_avg(mu, a.s, radius)?, i3 });
        }
    }
    emit(serde_json::to_string_pretty(&rows)?, &a.out)?;
    Ok(())
}

fn report(a: ReportArgs) -> Result<u8, ConfigError> {
    let reports = validate_report_json(&read(&a.input)?)?;
    let md = to_markdown(&reports);
    match &a.out {
        Some(p) => fs::write(p, md).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{md}"),
    }
    Ok(exit_code(&reports) as u8)
}

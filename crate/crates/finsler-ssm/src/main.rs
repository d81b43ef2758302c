use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use finsler_ssm::config::{split_pair, ConfigError, RunConfig};
use finsler_ssm::output::{catalog_json, catalog_text, tensors_json, trajectory_csv};
use finsler_ssm::verify::{self, VerifyError};
use finsler_ssm_core::spray::geodesic_integrate;
use finsler_ssm_core::{Error, EvalPoint, PhiModel};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "finsler-ssm",
    version,
    about = "Verify tensor identities of spherically symmetric Finsler metrics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in metric models.
    Catalog {
        #[arg(long)]
        json: bool,
    },
    /// Run the identity suite on seeded sample points.
    Verify(VerifyArgs),
    /// Dump every tensor at one point as JSON.
    Tensors(TensorsArgs),
    /// Integrate a geodesic with RK4 and write a CSV trace.
    Geodesic(GeodesicArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Model name from `catalog`.
    #[arg(long)]
    metric: Option<String>,
    /// Model parameter `k=v`; repeatable.
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Flat `key=value` file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    /// Dimension of the ambient space [default: 3].
    #[arg(long)]
    n: Option<usize>,
    /// Number of sampled points [default: 100].
    #[arg(long)]
    samples: Option<usize>,
    /// Sampler seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance override `name=value`; also accepted as `--tol-<name> <value>`.
    #[arg(long = "tol", value_name = "NAME=V")]
    tols: Vec<String>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TensorsArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated base point.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Comma-separated direction.
    #[arg(long, allow_hyphen_values = true)]
    y: String,
    /// Comma-separated anchor; `|a|·e₁` from the model by default.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GeodesicArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated start point.
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    /// Comma-separated initial velocity.
    #[arg(long, allow_hyphen_values = true)]
    y0: String,
    /// Comma-separated anchor; `|a|·e₁` from the model by default.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Number of RK4 steps.
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Step in the curve parameter; must be positive.
    #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true)]
    dt: f64,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Fail(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionMismatch
            | Error::InvalidDimension { .. }
            | Error::NonFinite
            | Error::ZeroDirection
            | Error::InvalidStep
            | Error::UnknownModel(_)
            | Error::InvalidParameter { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Fail(e.to_string()),
        }
    }
}

/// Rewrites `--tol-<name> v` and `--tol-<name>=v` into `--tol <name>=v`.
fn expand_tolerance_flags(args: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        match a.strip_prefix("--tol-") {
            Some(rest) => {
                out.push("--tol".into());
                match rest.split_once('=') {
                    Some((k, v)) => out.push(format!("{k}={v}")),
                    None => out.push(format!("{rest}={}", it.next().unwrap_or_default())),
                }
            }
            None => out.push(a),
        }
    }
    out
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>, Failure> {
    raw.iter()
        .map(|s| {
            let (k, v) = split_pair(s).ok_or_else(|| Failure::Usage(format!("--param expects k=v, got `{s}`")))?;
            let v: f64 = v
                .parse()
                .map_err(|_| Failure::Usage(format!("--param `{k}`: `{v}` is not a number")))?;
            Ok((k.to_string(), v))
        })
        .collect()
}

fn model_of(args: &ModelArgs) -> Result<PhiModel, Failure> {
    let name = args
        .metric
        .as_deref()
        .ok_or_else(|| Failure::Usage("--metric is required".into()))?;
    PhiModel::from_name(name, &parse_params(&args.params)?).map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_vector(flag: &str, s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("--{flag}: `{s}` is not a comma-separated list of numbers")))
        })
        .collect()
}

fn anchor_of(m: &PhiModel, raw: Option<&str>, n: usize) -> Result<Vec<f64>, Failure> {
    match raw {
        Some(s) => parse_vector("a", s),
        None => {
            let mut a = vec![0.0; n];
            if n > 0 {
                a[0] = m.anchor_norm();
            }
            Ok(a)
        }
    }
}

/// Writes to stdout; a closed pipe (`| head`) ends output quietly.
fn stdout(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Fail(format!("{}: {e}", path.display()))),
        None => {
            stdout(text);
            Ok(())
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<bool, Failure> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &a.config {
        cfg.apply_file(path)?;
    }
    if let Some(m) = a.model.metric {
        cfg.metric = m;
    }
    for (k, v) in parse_params(&a.model.params)? {
        cfg.params.insert(k, v);
    }
    if let Some(n) = a.n {
        cfg.dimension = n;
    }
    if let Some(s) = a.samples {
        cfg.sample_count = s;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    for t in &a.tols {
        let (k, v) = split_pair(t).ok_or_else(|| Failure::Usage(format!("--tol expects name=value, got `{t}`")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| Failure::Usage(format!("tolerance `{k}`: `{v}` is not a number")))?;
        cfg.set_tolerance(k, v)?;
    }
    if let Some(o) = a.out {
        cfg.output_path = Some(o);
    }
    let report = verify::run(&cfg).map_err(|e| match e {
        VerifyError::Config(c) => Failure::from(c),
        VerifyError::Sampling(s) => Failure::Fail(s.to_string()),
    })?;
    let json = report.to_json();
    if let Some(path) = &cfg.output_path {
        std::fs::write(path, &json).map_err(|e| Failure::Fail(format!("{}: {e}", path.display())))?;
    }
    if a.json {
        stdout(&json);
    } else {
        stdout(&report.to_text());
    }
    Ok(report.summary.pass)
}

fn cmd_tensors(a: TensorsArgs) -> Result<bool, Failure> {
    let m = model_of(&a.model)?;
    let x = parse_vector("x", &a.x)?;
    let y = parse_vector("y", &a.y)?;
    let an = anchor_of(&m, a.a.as_deref(), x.len())?;
    let p = EvalPoint::new(x, y, an)?;
    let v = tensors_json(&m, &p)?;
    let mut text = serde_json::to_string_pretty(&v).expect("json");
    text.push('\n');
    emit(a.out.as_ref(), &text)?;
    Ok(true)
}

fn cmd_geodesic(a: GeodesicArgs) -> Result<bool, Failure> {
    let m = model_of(&a.model)?;
    if !(a.dt > 0.0 && a.dt.is_finite()) {
        return Err(Failure::Usage(format!(
            "--dt must be positive and finite, got {}",
            a.dt
        )));
    }
    let x0 = parse_vector("x0", &a.x0)?;
    let y0 = parse_vector("y0", &a.y0)?;
    let an = anchor_of(&m, a.a.as_deref(), x0.len())?;
    EvalPoint::new(x0.clone(), y0.clone(), an.clone())?;
    let tr = geodesic_integrate(&m, &x0, &y0, &an, a.steps, a.dt)?;
    emit(a.out.as_ref(), &trajectory_csv(&tr))?;
    if tr.domain_exit {
        eprintln!("geodesic left the domain after {} steps", tr.points.len() - 1);
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(expand_tolerance_flags(std::env::args())) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Command::Catalog { json } => {
            if json {
                stdout(&(serde_json::to_string_pretty(&catalog_json()).expect("json") + "\n"));
            } else {
                stdout(&catalog_text());
            }
            Ok(true)
        }
        Command::Verify(a) => cmd_verify(a),
        Command::Tensors(a) => cmd_tensors(a),
        Command::Geodesic(a) => cmd_geodesic(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Fail(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

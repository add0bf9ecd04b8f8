//! Command-line front end: `limit`, `scan` and `equivalence`.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 solver error,
//! 3 unexpected divergence between the two limits.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::equivalence::{compare_limits_on, EquivalenceReport, Verdict, DEFAULT_EQUIVALENCE_TOL};
use crate::error::Error;
use crate::exact::{self, LimitRequest, LimitResult, DEFAULT_REL_TOL};
use crate::marginal::{draw_samples, Integrator, Marginal, SampleSet};
use crate::model::CountingModel;

pub use config::{parse_config, ModelConfig};

#[derive(Debug, Parser)]
#[command(name = "cls-limits", version)]
#[command(about = "CLs and Bayesian upper limits for Poisson counting experiments")]
pub struct Cli {
    /// Worker threads for per-sample work (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute upper limits on the signal strength.
    Limit(LimitArgs),
    /// Tabulate CLs, CLs+b, CLb or the posterior density against mu (CSV).
    Scan(ScanArgs),
    /// Run hybrid CLs and marginal Bayesian limits on shared samples and compare.
    Equivalence(EquivalenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Cls,
    Bayes,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntegratorArg {
    /// Monte Carlo draws from the priors.
    Mc,
    /// Tensor-product Gauss–Hermite quadrature (normal priors only).
    Gh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantityArg {
    Cls,
    Clsb,
    Clb,
    Posterior,
}

#[derive(Debug, Clone, Args)]
pub struct IntegrationArgs {
    /// How nuisance parameters are integrated out (ignored without systematics).
    #[arg(long, value_enum, default_value_t = IntegratorArg::Mc)]
    pub integrator: IntegratorArg,
    /// Monte Carlo seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Gauss–Hermite nodes per nuisance.
    #[arg(long, default_value_t = 32)]
    pub nodes: usize,
}

impl IntegrationArgs {
    fn integrator(&self) -> Integrator {
        match self.integrator {
            IntegratorArg::Mc => Integrator::MonteCarlo {
                n_samples: self.samples,
                seed: self.seed,
            },
            IntegratorArg::Gh => Integrator::GaussHermite {
                nodes_per_dim: self.nodes,
            },
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct LimitArgs {
    /// Model configuration (JSON).
    pub config: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    /// Confidence level; the exclusion threshold is alpha = 1 - cl.
    #[arg(long, default_value_t = 0.95)]
    pub cl: f64,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    /// Relative tolerance of the root solver.
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    pub tol: f64,
    /// Output path, `-` for standard output.
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    pub config: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    pub mu_min: f64,
    #[arg(long)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = QuantityArg::Cls)]
    pub quantity: QuantityArg,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    #[arg(long, default_value = "-")]
    pub out: String,
}

#[derive(Debug, Clone, Args)]
pub struct EquivalenceArgs {
    pub config: PathBuf,
    /// Confidence level; the exclusion threshold is alpha = 1 - cl.
    #[arg(long, default_value_t = 0.95)]
    pub cl: f64,
    #[command(flatten)]
    pub integration: IntegrationArgs,
    /// Relative difference below which the limits count as equivalent.
    #[arg(long, default_value_t = DEFAULT_EQUIVALENCE_TOL)]
    pub tol: f64,
    /// Relative tolerance of the root solver.
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    pub solver_tol: f64,
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Draw the Bayesian samples with this seed instead (breaks sample sharing).
    #[arg(long, hide = true)]
    pub debug_bayes_seed: Option<u64>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Solver(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Solver(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code; diagnostics go to `stderr`.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    let mut buffer = Vec::new();
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli.command, &mut buffer)),
            Err(e) => Err(CliError::Usage(format!("cannot start thread pool: {e}"))),
        },
        None => execute(&cli.command, &mut buffer),
    };
    if let Err(e) = stdout.write_all(&buffer).and_then(|()| stdout.flush()) {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return 1;
    }
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: &Command, stdout: &mut Vec<u8>) -> Result<i32, CliError> {
    match command {
        Command::Limit(args) => cmd_limit(args, stdout).map(|()| 0),
        Command::Scan(args) => cmd_scan(args, stdout).map(|()| 0),
        Command::Equivalence(args) => cmd_equivalence(args, stdout),
    }
}

struct LoadedConfig {
    model: CountingModel<f64>,
    sha256: String,
}

fn load(path: &Path) -> Result<LoadedConfig, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let text =
        std::str::from_utf8(&bytes).map_err(|e| CliError::Config(format!("{} is not UTF-8: {e}", path.display())))?;
    let cfg = parse_config(text).map_err(CliError::Config)?;
    let model = cfg.to_model().map_err(|e| CliError::Config(e.to_string()))?;
    let sha256 = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    Ok(LoadedConfig { model, sha256 })
}

fn emit(out: &str, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    if out == "-" {
        stdout
            .write_all(bytes)
            .map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
    } else {
        fs::write(out, bytes).map_err(|e| CliError::Usage(format!("cannot write {out}: {e}")))
    }
}

fn request(cl: f64, tol: f64) -> Result<LimitRequest<f64>, CliError> {
    if !(cl > 0.0 && cl < 1.0) {
        return Err(CliError::Usage(format!("--cl must lie in (0, 1), got {cl}")));
    }
    LimitRequest::from_cl(cl)
        .and_then(|r| r.with_rel_tol(tol))
        .map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum IntegratorJson {
    MonteCarlo { n_samples: usize, seed: u64 },
    GaussHermite { nodes_per_dim: usize },
}

impl From<Integrator> for IntegratorJson {
    fn from(i: Integrator) -> Self {
        match i {
            Integrator::MonteCarlo { n_samples, seed } => IntegratorJson::MonteCarlo { n_samples, seed },
            Integrator::GaussHermite { nodes_per_dim } => IntegratorJson::GaussHermite { nodes_per_dim },
        }
    }
}

#[derive(Serialize)]
struct Limits {
    #[serde(skip_serializing_if = "Option::is_none")]
    cls: Option<LimitResult<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bayes: Option<LimitResult<f64>>,
}

#[derive(Serialize)]
struct LimitOutput {
    command: &'static str,
    config_sha256: String,
    cl: f64,
    alpha: f64,
    marginalized: bool,
    integrator: Option<IntegratorJson>,
    limits: Limits,
    #[serde(skip_serializing_if = "Option::is_none")]
    rel_diff: Option<f64>,
}

fn cmd_limit(args: &LimitArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(&args.config)?;
    let req = request(args.cl, args.tol)?;
    let model = &cfg.model;
    let want_cls = args.method != MethodArg::Bayes;
    let want_bayes = args.method != MethodArg::Cls;

    let marginalized = model.has_systematics();
    let (cls, bayes, integrator) = if marginalized {
        let integrator = args.integration.integrator();
        let samples = draw_samples(model.systematics(), &integrator)?;
        let marginal = Marginal::new(model, &samples)?;
        let cls = want_cls.then(|| marginal.cls_upper_limit(&req)).transpose()?;
        let bayes = want_bayes.then(|| marginal.bayes_upper_limit(&req)).transpose()?;
        (cls, bayes, Some(integrator.into()))
    } else {
        let cls = want_cls.then(|| exact::cls_upper_limit(model, &req)).transpose()?;
        let bayes = want_bayes
            .then(|| exact::bayesian_upper_limit_closed_form(model, &req))
            .transpose()?;
        (cls, bayes, None)
    };

    let rel_diff = match (&cls, &bayes) {
        (Some(a), Some(b)) => Some((a.mu_up - b.mu_up).abs() / a.mu_up.max(b.mu_up)),
        _ => None,
    };
    let out = LimitOutput {
        command: "limit",
        config_sha256: cfg.sha256,
        cl: args.cl,
        alpha: req.alpha,
        marginalized,
        integrator,
        limits: Limits { cls, bayes },
        rel_diff,
    };
    let bytes = output::to_json_line(&out).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(&args.out, &bytes, stdout)
}

fn cmd_scan(args: &ScanArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if !(args.mu_min >= 0.0 && args.mu_min < args.mu_max && args.mu_max.is_finite()) {
        return Err(CliError::Usage(format!(
            "need 0 <= --mu-min < --mu-max (got {} and {})",
            args.mu_min, args.mu_max
        )));
    }
    if args.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let cfg = load(&args.config)?;
    let model = &cfg.model;
    let step = (args.mu_max - args.mu_min) / (args.points - 1) as f64;
    let grid: Vec<f64> = (0..args.points)
        .map(|i| {
            if i + 1 == args.points {
                args.mu_max
            } else {
                args.mu_min + step * i as f64
            }
        })
        .collect();

    let rows: Vec<(f64, f64, Option<f64>)> = if model.has_systematics() {
        let samples = draw_samples(model.systematics(), &args.integration.integrator())?;
        let marginal = Marginal::new(model, &samples)?;
        grid.iter()
            .map(|&mu| {
                let est = match args.quantity {
                    QuantityArg::Cls => marginal.cls(mu)?,
                    QuantityArg::Clsb => marginal.clsb(mu)?,
                    QuantityArg::Clb => marginal.clb(),
                    QuantityArg::Posterior => marginal.posterior_density(mu)?,
                };
                Ok((mu, est.value, est.stderr))
            })
            .collect::<Result<_, Error>>()?
    } else {
        grid.iter()
            .map(|&mu| {
                let v = match args.quantity {
                    QuantityArg::Cls => exact::cls_value(model, mu)?,
                    QuantityArg::Clsb => exact::clsb_value(model, mu)?,
                    QuantityArg::Clb => exact::clb_value(model)?,
                    QuantityArg::Posterior => exact::posterior_density(model, mu)?,
                };
                Ok((mu, v, None))
            })
            .collect::<Result<_, Error>>()?
    };
    let bytes = output::scan_csv(&rows).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(&args.out, &bytes, stdout)
}

#[derive(Serialize)]
struct EquivalenceOutput<'a> {
    command: &'static str,
    config_sha256: String,
    cl: f64,
    alpha: f64,
    integrator: IntegratorJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    debug_bayes_seed: Option<u64>,
    #[serde(flatten)]
    report: &'a EquivalenceReport<f64>,
    cls: LimitResult<f64>,
    bayes: LimitResult<f64>,
}

fn cmd_equivalence(args: &EquivalenceArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    if !args.tol.is_finite() || args.tol <= 0.0 {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", args.tol)));
    }
    let cfg = load(&args.config)?;
    let req = request(args.cl, args.solver_tol)?;
    let model = &cfg.model;
    let integrator = args.integration.integrator();
    let cls_samples: SampleSet<f64> = draw_samples(model.systematics(), &integrator)?;
    let bayes_samples = match (args.debug_bayes_seed, integrator) {
        (None, _) => None,
        (Some(seed), Integrator::MonteCarlo { n_samples, .. }) => Some(draw_samples(
            model.systematics(),
            &Integrator::MonteCarlo { n_samples, seed },
        )?),
        (Some(_), Integrator::GaussHermite { .. }) => {
            return Err(CliError::Usage(
                "--debug-bayes-seed needs the Monte Carlo integrator".into(),
            ))
        }
    };
    let report = compare_limits_on(
        model,
        &req,
        &cls_samples,
        bayes_samples.as_ref().unwrap_or(&cls_samples),
        args.tol,
    )?;
    let out = EquivalenceOutput {
        command: "equivalence",
        config_sha256: cfg.sha256,
        cl: args.cl,
        alpha: req.alpha,
        integrator: integrator.into(),
        debug_bayes_seed: args.debug_bayes_seed,
        report: &report,
        cls: report.cls,
        bayes: report.bayes,
    };
    let bytes = output::to_json_line(&out).map_err(|e| CliError::Usage(e.to_string()))?;
    emit(&args.out, &bytes, stdout)?;
    Ok(if report.verdict == Verdict::UnexpectedDivergence {
        3
    } else {
        0
    })
}

//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::checks::run_checks;
use crate::error::{Error, Result};
use crate::experiments::{lil_curve, mc_risk, width_curve, Estimator, ExperimentConfig, SignalKind};
use crate::io::{emit, read_series, to_csv, to_json, FitReport};
use crate::kernels::sparse_construct;
use crate::model::ModelParams;
use crate::shape::shape_lse;
use crate::solvers::{adaptive_fit, default_k_max, dp_fit, exhaustive_fit, PenaltySpec, Solver, DEFAULT_BUDGET};

#[derive(Debug, Parser)]
#[command(name = "freeknot", version, about = "Free-knot spline regression on an equispaced grid")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Least-squares fit with at most k pieces.
    Fit(FitArgs),
    /// Penalized choice of the number of pieces.
    Adapt(AdaptArgs),
    /// d-monotone least squares with at most k pieces.
    Shapefit(ShapeArgs),
    /// Monte Carlo risk curve over a grid of sample sizes.
    McRisk(RiskArgs),
    /// Mean squared LIL statistic over a grid of sample sizes.
    Lil(LilArgs),
    /// Mean complexity width over a grid of sample sizes.
    Width(WidthArgs),
    /// Exact middle-vanishing construction and its nullspace.
    Sparse(SparseArgs),
    /// Runs a suite of kernel checks.
    Checks(ChecksArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SolverArg {
    Dp,
    Exhaustive,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Refuse enumerations larger than this many knot configurations.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    pub d0: i32,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "dp")]
    pub solver: SolverArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct AdaptArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    pub d0: i32,
    /// Defaults to min(k0 + 3, n/(d+1)).
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Noise level; estimated from first differences when absent.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = PenaltySpec::DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long, value_enum, default_value = "dp")]
    pub solver: SolverArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    pub d0: i32,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_grid: Vec<usize>,
    #[arg(long)]
    pub reps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// zero, lf_spline, sparse_boxcar, shaped_lf or custom_file.
    #[arg(long, default_value = "zero")]
    pub signal: String,
    /// l0_fit, adaptive or shape_lse.
    #[arg(long, default_value = "l0_fit")]
    pub estimator: String,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = PenaltySpec::DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Amplitude multiplier for generated signals.
    #[arg(long, default_value_t = 1.0)]
    pub c_scale: f64,
    /// Signal file for --signal custom_file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct LilArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_grid: Vec<usize>,
    #[arg(long)]
    pub reps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WidthArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    pub d0: i32,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_grid: Vec<usize>,
    #[arg(long)]
    pub reps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SparseArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub d0: i32,
    #[arg(long)]
    pub k: usize,
    /// Grid size for the materialized signal.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChecksArgs {
    /// binomial, moment, beta, quadform, dof, sparse, seq2func, coefbound or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Seed of the calibration draws; validation uses seed + 1.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `median |Y_{i+1} - Y_i| / (sqrt(2) * 0.6745)`.
pub fn estimate_sigma(y: &[f64]) -> f64 {
    if y.len() < 2 {
        return 0.0;
    }
    let mut diffs: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    diffs.sort_by(f64::total_cmp);
    let m = diffs.len();
    let median = if m % 2 == 1 {
        diffs[m / 2]
    } else {
        0.5 * (diffs[m / 2 - 1] + diffs[m / 2])
    };
    median / (std::f64::consts::SQRT_2 * 0.6745)
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| Error::param("--seed is required for stochastic subcommands"))
}

fn solver(arg: SolverArg, budget: u128) -> Solver {
    match arg {
        SolverArg::Dp => Solver::Dp,
        SolverArg::Exhaustive => Solver::Exhaustive { budget },
    }
}

pub fn execute(cmd: &Command) -> Result<()> {
    match cmd {
        Command::Fit(a) => {
            let y = read_series(&a.input)?;
            let params = ModelParams::new(a.d, a.d0, a.k, y.len(), 1.0)?;
            let fit = match solver(a.solver, a.common.budget) {
                Solver::Dp => dp_fit(&y, &params)?,
                Solver::Exhaustive { budget } => exhaustive_fit(&y, &params, budget)?,
            };
            emit(a.common.out.as_deref(), &to_json(&FitReport::from_fit(&fit, a.d0))?)
        }
        Command::Adapt(a) => {
            let y = read_series(&a.input)?;
            let n = y.len();
            let sigma = a.sigma.unwrap_or_else(|| estimate_sigma(&y));
            let k_max = match a.k_max {
                Some(k) => k,
                None => default_k_max(a.d, a.d0, n)?,
            };
            let params = ModelParams::new(a.d, a.d0, k_max, n, sigma)?;
            let spec = PenaltySpec {
                tau: a.tau,
                sigma,
                d: a.d,
                d0: a.d0,
                n,
            };
            let fit = adaptive_fit(&y, &params, &spec, k_max, solver(a.solver, a.common.budget))?;
            emit(a.common.out.as_deref(), &to_json(&FitReport::from_adaptive(&fit, a.d0))?)
        }
        Command::Shapefit(a) => {
            let y = read_series(&a.input)?;
            let fit = shape_lse(&y, a.d, a.k, a.common.budget)?;
            emit(a.common.out.as_deref(), &to_json(&FitReport::from_shape(&fit))?)
        }
        Command::McRisk(a) => {
            let seed = require_seed(a.seed)?;
            let signal: SignalKind = a.signal.parse()?;
            let estimator: Estimator = a.estimator.parse()?;
            let custom = match (signal, &a.input) {
                (SignalKind::CustomFile, Some(p)) => Some(read_series(p)?),
                (SignalKind::CustomFile, None) => {
                    return Err(Error::param("--signal custom_file needs --input"));
                }
                _ => None,
            };
            let cfg = ExperimentConfig {
                n_grid: a.n_grid.clone(),
                d: a.d,
                d0: a.d0,
                k: a.k,
                reps: a.reps,
                master_seed: seed,
                signal,
                sigma: a.sigma,
                c_scale: a.c_scale,
                tau: a.tau,
                k_max: a.k_max,
                budget: a.common.budget,
            };
            let rows = mc_risk(&cfg, estimator, custom.as_deref())?;
            for r in &rows {
                if let Some(e) = &r.error {
                    eprintln!("warning: cell n = {} failed: {e}", r.n);
                }
            }
            emit(a.common.out.as_deref(), &to_csv(&rows)?)
        }
        Command::Lil(a) => {
            let seed = require_seed(a.seed)?;
            let rows = lil_curve(&a.n_grid, a.d, a.reps, seed)?;
            emit(a.out.as_deref(), &to_csv(&rows)?)
        }
        Command::Width(a) => {
            let seed = require_seed(a.seed)?;
            let rows = width_curve(&a.n_grid, a.d, a.d0, a.k, a.reps, seed, a.common.budget)?;
            emit(a.common.out.as_deref(), &to_csv(&rows)?)
        }
        Command::Sparse(a) => {
            let sys = sparse_construct(a.d, a.d0, a.k, a.n)?;
            emit(a.out.as_deref(), &to_json(&sys.to_json())?)
        }
        Command::Checks(a) => {
            let report = run_checks(&a.suite, a.seed)?;
            emit(a.out.as_deref(), &to_json(&report)?)?;
            if report.pass {
                Ok(())
            } else {
                Err(Error::Precondition(format!("suite '{}' failed", a.suite)))
            }
        }
    }
}

/// Parses `args` (including the program name), runs the command, and
/// returns the process exit code: 0 on success, 2 when an enumeration
/// budget is refused, 1 for every other error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

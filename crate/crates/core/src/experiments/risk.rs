use std::str::FromStr;

use serde::Serialize;

use super::noise::stream_rng;
use super::{build_signal, check_grid, log_rate, loglog_rate, mean_se, noise, stream_id, SignalKind};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::shape::shape_lse;
use crate::solvers::{
    adaptive_fit, default_k_max, dp_fit, dp_path, exhaustive_fit, exhaustive_path, penalty, PenaltySpec, Solver,
};

/// Streams for signal draws and calibration runs are kept apart from the
/// noise streams of the same cell.
const SIGNAL_STREAM: u64 = 1 << 63;
const CALIBRATION_STREAM: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_grid: Vec<usize>,
    pub d: usize,
    pub d0: i32,
    pub k: usize,
    pub reps: usize,
    pub master_seed: u64,
    pub signal: SignalKind,
    pub sigma: f64,
    /// Multiplier of generated signals (in units of `sigma`).
    pub c_scale: f64,
    /// Penalty multiplier for the adaptive estimator.
    pub tau: f64,
    /// Largest piece count for the adaptive estimator; `None` uses the default.
    pub k_max: Option<usize>,
    pub budget: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    L0Fit,
    Adaptive,
    ShapeLse,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::L0Fit => "l0_fit",
            Estimator::Adaptive => "adaptive",
            Estimator::ShapeLse => "shape_lse",
        }
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "l0_fit" => Estimator::L0Fit,
            "adaptive" => Estimator::Adaptive,
            "shape_lse" => Estimator::ShapeLse,
            other => return Err(Error::param(format!("unknown estimator '{other}'"))),
        })
    }
}

/// One row of the risk curve CSV. Failed cells carry NaN in the risk
/// columns and the reason in `error`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskRow {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub d0: i32,
    pub estimator: String,
    pub mean_risk: f64,
    pub std_error: f64,
    pub rate_loglog: f64,
    pub rate_log: f64,
    pub reps: usize,
    pub seed: u64,
    #[serde(skip)]
    pub error: Option<String>,
}

fn estimate(y: &[f64], cfg: &ExperimentConfig, n: usize, est: Estimator) -> Result<Vec<f64>> {
    let params = ModelParams::new(cfg.d, cfg.d0, cfg.k, n, cfg.sigma)?;
    let solver = if cfg.d0 == -1 {
        Solver::Dp
    } else {
        Solver::Exhaustive { budget: cfg.budget }
    };
    Ok(match est {
        Estimator::L0Fit => match solver {
            Solver::Dp => dp_fit(y, &params)?.theta_hat,
            Solver::Exhaustive { budget } => exhaustive_fit(y, &params, budget)?.theta_hat,
        },
        Estimator::Adaptive => {
            let k_max = match cfg.k_max {
                Some(k) => k,
                None => default_k_max(cfg.d, cfg.d0, n)?,
            };
            let spec = PenaltySpec {
                tau: cfg.tau,
                sigma: cfg.sigma,
                d: cfg.d,
                d0: cfg.d0,
                n,
            };
            adaptive_fit(y, &params, &spec, k_max, solver)?.fit.theta_hat
        }
        Estimator::ShapeLse => shape_lse(y, cfg.d, cfg.k, cfg.budget)?.fit.theta_hat,
    })
}

fn run_cell(cfg: &ExperimentConfig, n: usize, est: Estimator, custom: Option<&[f64]>) -> Result<(f64, f64)> {
    let losses = (0..cfg.reps)
        .map(|r| {
            let stream = stream_id(n, r);
            let mut srng = stream_rng(cfg.master_seed, stream | SIGNAL_STREAM);
            let theta0 = build_signal(cfg.signal, n, cfg.d, cfg.k, cfg.sigma, cfg.c_scale, custom, &mut srng)?;
            let eps = noise(n, cfg.master_seed, stream);
            let y: Vec<f64> = theta0.iter().zip(&eps).map(|(t, e)| t + cfg.sigma * e).collect();
            let hat = estimate(&y, cfg, n, est)?;
            Ok(hat.iter().zip(&theta0).map(|(a, b)| (a - b) * (a - b)).sum())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_se(&losses))
}

/// Monte Carlo estimate of `E |theta_hat - theta0|^2` for each `n` in the grid.
///
/// Configuration errors abort; a solver failure in one cell marks that row
/// failed and the grid continues.
pub fn mc_risk(cfg: &ExperimentConfig, est: Estimator, custom: Option<&[f64]>) -> Result<Vec<RiskRow>> {
    check_grid(&cfg.n_grid, cfg.reps)?;
    if !(cfg.sigma >= 0.0) {
        return Err(Error::param("sigma must be non-negative"));
    }
    ModelParams::new(cfg.d, cfg.d0, cfg.k, cfg.n_grid[0].max(cfg.d + 1), cfg.sigma)?;
    Ok(cfg
        .n_grid
        .iter()
        .map(|&n| {
            let (mean_risk, std_error, error) = match run_cell(cfg, n, est, custom) {
                Ok((m, s)) => (m, s, None),
                Err(e) => (f64::NAN, f64::NAN, Some(e.to_string())),
            };
            RiskRow {
                n,
                k: cfg.k,
                d: cfg.d,
                d0: cfg.d0,
                estimator: est.name().to_string(),
                mean_risk,
                std_error,
                rate_loglog: cfg.k as f64 * loglog_rate(n, cfg.k),
                rate_log: cfg.k as f64 * log_rate(n, cfg.k),
                reps: cfg.reps,
                seed: cfg.master_seed,
                error,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauCalibration {
    pub tau: f64,
    /// Fraction of null replicates selecting one piece at `tau`.
    pub null_one_fraction: f64,
    pub level: f64,
    pub reps: usize,
    pub seed: u64,
}

/// Smallest `tau` in `grid` for which pure noise (`sigma = 1`) selects a
/// single piece in at least a `level` fraction of replicates.
#[allow(clippy::too_many_arguments)]
pub fn calibrate_tau(
    n: usize,
    d: usize,
    d0: i32,
    k_max: usize,
    grid: &[f64],
    level: f64,
    reps: usize,
    seed: u64,
    budget: u128,
) -> Result<TauCalibration> {
    if grid.is_empty() || reps == 0 {
        return Err(Error::param("calibration needs a tau grid and at least one replicate"));
    }
    let params = ModelParams::new(d, d0, k_max, n, 1.0)?;
    let unit = PenaltySpec {
        tau: 1.0,
        sigma: 1.0,
        d,
        d0,
        n,
    };
    let shapes = (1..=k_max).map(|k| penalty(k, &unit)).collect::<Result<Vec<_>>>()?;
    let paths = (0..reps)
        .map(|r| {
            let y = noise(n, seed, stream_id(n, r) | CALIBRATION_STREAM);
            let path = if d0 == -1 {
                dp_path(&y, &params)?
            } else {
                exhaustive_path(&y, &params, budget)?
            };
            Ok(path.iter().map(|f| f.sse).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    for &tau in &sorted {
        let ones = paths
            .iter()
            .filter(|sse| {
                let obj = |i: usize| sse[i] + tau * shapes[i];
                (1..sse.len()).all(|i| obj(i) >= obj(0))
            })
            .count();
        let frac = ones as f64 / reps as f64;
        if frac >= level {
            return Ok(TauCalibration {
                tau,
                null_one_fraction: frac,
                level,
                reps,
                seed,
            });
        }
    }
    Err(Error::Precondition(format!(
        "no tau in the grid reaches null one-piece frequency {level}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::DEFAULT_BUDGET;

    fn cfg(signal: SignalKind, sigma: f64, reps: usize) -> ExperimentConfig {
        ExperimentConfig {
            n_grid: vec![32, 64],
            d: 0,
            d0: -1,
            k: 3,
            reps,
            master_seed: 5,
            signal,
            sigma,
            c_scale: 1.0,
            tau: 2.5,
            k_max: None,
            budget: DEFAULT_BUDGET,
        }
    }

    #[test]
    fn noiseless_representable_truth_has_zero_risk() {
        let c = cfg(SignalKind::SparseBoxcar, 0.0, 3);
        for row in mc_risk(&c, Estimator::L0Fit, None).unwrap() {
            assert_eq!(row.mean_risk, 0.0);
            assert_eq!(row.std_error, 0.0);
        }
    }

    #[test]
    fn standard_error_scales_like_inverse_root_reps() {
        let small = mc_risk(&cfg(SignalKind::SparseBoxcar, 1.0, 100), Estimator::L0Fit, None).unwrap();
        let large = mc_risk(&cfg(SignalKind::SparseBoxcar, 1.0, 400), Estimator::L0Fit, None).unwrap();
        for (a, b) in small.iter().zip(&large) {
            let ratio = a.std_error / b.std_error;
            assert!((ratio - 2.0).abs() < 0.6, "ratio {ratio}");
        }
    }

    #[test]
    fn failed_cells_do_not_abort_the_grid() {
        let mut c = cfg(SignalKind::CustomFile, 1.0, 2);
        let custom = vec![0.0; 64];
        let rows = mc_risk(&c, Estimator::L0Fit, Some(&custom)).unwrap();
        assert!(rows[0].error.is_some() && rows[0].mean_risk.is_nan());
        assert!(rows[1].error.is_none());
        c.reps = 0;
        assert!(mc_risk(&c, Estimator::L0Fit, Some(&custom)).is_err());
    }

    #[test]
    fn rates_and_reproducibility() {
        let c = cfg(SignalKind::LfSpline, 1.0, 4);
        let a = mc_risk(&c, Estimator::Adaptive, None).unwrap();
        assert_eq!(a, mc_risk(&c, Estimator::Adaptive, None).unwrap());
        assert!((a[0].rate_log - 3.0 * (std::f64::consts::E * 32.0 / 3.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn calibration_picks_the_smallest_adequate_tau() {
        let grid = [0.01, 0.5, 1.0, 2.0, 4.0, 8.0];
        let c = calibrate_tau(64, 0, -1, 4, &grid, 0.9, 40, 3, DEFAULT_BUDGET).unwrap();
        assert!(c.null_one_fraction >= 0.9);
        let pos = grid.iter().position(|&t| t == c.tau).unwrap();
        if pos > 0 {
            let lower = calibrate_tau(64, 0, -1, 4, &grid[..pos], 0.9, 40, 3, DEFAULT_BUDGET);
            assert!(lower.is_err());
        }
    }
}

//! Monte Carlo experiments in the Gaussian sequence model.

mod lil;
mod noise;
mod risk;
mod signals;
mod width;

pub use lil::{lil_curve, lil_statistic, lil_statistic_naive, LilRow};
pub use noise::{noise, simulate, stream_id};
pub use risk::{calibrate_tau, mc_risk, Estimator, ExperimentConfig, RiskRow, TauCalibration};
pub use signals::{
    build_signal, least_favorable_signal, lf_levels, shaped_lf_ensemble, shaped_lf_levels, sparse_boxcar, LfIndex,
    SignalKind,
};
pub use width::{complexity_width, width_curve, WidthRow};

/// `log log(16 n / k)`.
pub fn loglog_rate(n: usize, k: usize) -> f64 {
    (16.0 * n as f64 / k as f64).ln().ln()
}

/// `log(e n / k)`.
pub fn log_rate(n: usize, k: usize) -> f64 {
    (std::f64::consts::E * n as f64 / k as f64).ln()
}

/// Mean and standard error of the mean.
pub(crate) fn mean_se(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

pub(crate) fn check_grid(n_grid: &[usize], reps: usize) -> crate::Result<()> {
    if reps == 0 {
        return Err(crate::Error::param("reps must be at least 1"));
    }
    if n_grid.is_empty() {
        return Err(crate::Error::param("n grid is empty"));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(crate::Error::param("n grid must be strictly increasing"));
    }
    Ok(())
}

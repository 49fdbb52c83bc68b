//! Exact least-squares fits over free-knot classes and the penalized
//! selection of the number of pieces.

mod adaptive;
mod dp;
mod exhaustive;
mod given_knots;
mod penalty;
mod segment;

pub use adaptive::{adaptive_fit, default_k_max, AdaptiveFit, Solver, TraceEntry};
pub use dp::{dp_fit, dp_path};
pub use exhaustive::{
    count_configurations, exhaustive_fit, exhaustive_path, for_each_configuration, DEFAULT_BUDGET,
};
pub use given_knots::fit_given_knots;
pub use penalty::{penalty, PenaltySpec};
pub use segment::{segment_cost, SegmentFit};

use crate::model::{KnotVector, PiecewiseSpline};

/// Outcome of a least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub theta_hat: Vec<f64>,
    pub spline: PiecewiseSpline,
    pub sse: f64,
    pub k_selected: usize,
}

impl FitResult {
    pub fn knots(&self) -> &KnotVector {
        &self.spline.knots
    }

    pub(crate) fn from_theta(y: &[f64], theta_hat: Vec<f64>, spline: PiecewiseSpline, k: usize) -> Self {
        let sse = sum_sq_diff(y, &theta_hat);
        Self {
            theta_hat,
            spline,
            sse,
            k_selected: k,
        }
    }
}

pub(crate) fn sum_sq_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Slack used when comparing objective values so that rounding noise does
/// not override the deterministic tie-break.
pub(crate) fn tie_slack(y: &[f64]) -> f64 {
    1e-12 * (1.0 + y.iter().map(|v| v * v).sum::<f64>())
}

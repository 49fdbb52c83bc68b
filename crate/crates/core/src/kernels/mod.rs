//! Numerical and exact checks of the algebra behind the rate results.

mod beta;
mod binomial;
mod dof;
mod moment;
mod quad;
mod seq2func;
mod sparse;

pub use beta::{
    beta_ratio_check, beta_table, calibrate_beta_ratio, cancelling_pairs, min_beta_ratio, random_knots, BetaTable,
};
pub use binomial::binomial_identity_check;
pub use dof::dof_min_pieces;
pub use moment::{hilbert_limit, moment_matrix, moment_matrix_lambda_min};
pub use quad::{calibrate_quad_forms, quad_form_residuals, random_end_long_spline};
pub use seq2func::{seq2func_constant, seq2func_piece_ratio};
pub use sparse::{rational_nullspace, sparse_construct, SparseSignal, SparseSystem};

use serde::Serialize;

/// Empirically calibrated constant together with how it was obtained.
#[derive(Debug, Clone, Serialize)]
pub struct Calibration {
    pub name: String,
    pub constant: f64,
    /// Extreme value observed on the calibration instances.
    pub observed: f64,
    pub margin: f64,
    pub seed: u64,
    pub instances: usize,
    pub grid: String,
}

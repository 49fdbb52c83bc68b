use nalgebra::DVector;

use super::FitResult;
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::model::{basis_matrix, piecewise_from_global, KnotVector, ModelParams};

/// Projection of `y` onto the span of the truncated power basis for these
/// knots.
pub fn fit_given_knots(y: &[f64], params: &ModelParams, knots: &KnotVector) -> Result<FitResult> {
    if y.len() != params.n {
        return Err(Error::param(format!(
            "signal length {} does not match n = {}",
            y.len(),
            params.n
        )));
    }
    if knots.nonempty_count() > params.k {
        return Err(Error::param(format!(
            "{} nonempty pieces exceed k = {}",
            knots.nonempty_count(),
            params.k
        )));
    }
    let x = basis_matrix(params, knots)?;
    let rhs = DVector::from_column_slice(y);
    let coef = least_squares(&x, &rhs)?;
    let theta_hat: Vec<f64> = (&x * &coef).iter().copied().collect();
    let spline = piecewise_from_global(params, knots, coef.as_slice())?;
    Ok(FitResult::from_theta(y, theta_hat, spline, params.k))
}

use nalgebra::{DMatrix, DVector};

use super::canonical::{check_distinct, left_power, right_power, MonotoneCanonical};
use super::nnls::mixed_nnls;
use crate::error::{Error, Result};
use crate::linalg::factorial;
use crate::model::{validate_knots, KnotVector};
use crate::solvers::{count_configurations, for_each_configuration, tie_slack, FitResult};

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeFit {
    pub fit: FitResult,
    pub canonical: MonotoneCanonical,
}

/// Least squares over canonical forms with fixed knots and pivot.
pub fn fit_shape_given_knots(y: &[f64], d: usize, knots: &KnotVector, j_star: usize) -> Result<ShapeFit> {
    check_distinct(knots)?;
    let n = knots.n();
    if y.len() != n {
        return Err(Error::param(format!("signal length {} does not match n = {n}", y.len())));
    }
    if knots.degree() != d {
        return Err(Error::param("knots validated for a different degree"));
    }
    let k = knots.pieces();
    if j_star > k {
        return Err(Error::param(format!("pivot {j_star} outside [0, {k}]")));
    }
    let kn = knots.as_slice();
    let nf = n as f64;
    let sign = MonotoneCanonical::a_sign(d);
    let free = DMatrix::from_fn(n, d, |r, l| ((r + 1) as f64 / nf).powi(l as i32) / factorial(l));
    let na = j_star;
    let nb = k - j_star;
    let cons = DMatrix::from_fn(n, na + nb, |r, col| {
        let t = r + 1;
        if col < na {
            sign * left_power(kn[col + 1], t, d, nf)
        } else {
            right_power(kn[j_star + col - na], t, d, nf)
        }
    });
    let sol = mixed_nnls(&free, &cons, &DVector::from_column_slice(y))?;
    let a = sol.nonneg[..na].iter().map(|v| sign * v).collect();
    let b = sol.nonneg[na..].to_vec();
    let canonical = MonotoneCanonical::new(d, j_star, a, b, sol.free, knots.clone())?;
    let theta_hat = canonical.evaluate();
    let spline = canonical.to_piecewise();
    let fit = FitResult::from_theta(y, theta_hat, spline, k);
    Ok(ShapeFit { fit, canonical })
}

/// Least squares over `Theta*(d, k)`: every knot vector and every pivot.
///
/// Only maximal knot vectors are solved: those with exactly `k` pieces, or
/// whose pieces are all too short to split. Any other vector can be refined
/// into a maximal one whose class contains it, so the minimum is unchanged.
/// Ties keep the first maximal vector in lexicographic order, then the
/// smallest pivot.
pub fn shape_lse(y: &[f64], d: usize, k: usize, budget: u128) -> Result<ShapeFit> {
    let n = y.len();
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    if n < d + 1 {
        return Err(Error::InfeasibleSegment { len: n, degree: d });
    }
    let count = count_configurations(n, d, k);
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    let p = d + 1;
    let slack = tie_slack(y);
    let mut best: Option<ShapeFit> = None;
    for_each_configuration(n, d, k, |padded| {
        let m = padded.nonempty_count();
        let distinct: Vec<usize> = padded.as_slice()[k - m..].to_vec();
        let maximal = m == k || distinct.windows(2).all(|w| w[1] - w[0] < 2 * p);
        if !maximal {
            return Ok(());
        }
        let kv = validate_knots(&distinct, d, n)?;
        for j_star in 0..=m {
            let f = fit_shape_given_knots(y, d, &kv, j_star)?;
            if best.as_ref().is_none_or(|b| f.fit.sse < b.fit.sse - slack) {
                best = Some(f);
            }
        }
        Ok(())
    })?;
    let mut out = best.expect("the single-piece configuration is always maximal or refinable");
    out.fit.k_selected = k;
    Ok(out)
}

use nalgebra::{DMatrix, DVector};

use super::knots::{validate_knots, KnotVector};
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::linalg::{least_squares, positive_power, RunningLeastSquares};
use crate::solvers::fit_given_knots;

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// Knots with the fewest nonempty pieces reproducing the signal.
    pub witness: Option<KnotVector>,
}

impl Membership {
    fn no() -> Self {
        Self {
            member: false,
            witness: None,
        }
    }
}

/// Residual norm of the best two-piece fit to the `2(d+1)` points around
/// `t` with a knot at `t` and derivatives `0..shared` matched there. Grid
/// units keep the design well scaled.
fn joint_residual(theta: &[f64], t: usize, d: usize, shared: usize) -> Option<f64> {
    let p = d + 1;
    let rows: Vec<usize> = (t - d..=t + p).collect();
    let cols = p + (p - shared);
    let x = DMatrix::from_fn(rows.len(), cols, |r, c| {
        let u = rows[r] as f64 - t as f64;
        if c < p {
            u.powi(c as i32)
        } else {
            positive_power(u, shared + c - p)
        }
    });
    let y = DVector::from_fn(rows.len(), |r, _| theta[rows[r] - 1]);
    let coef = least_squares(&x, &y).ok()?;
    Some((&y - &x * coef).norm())
}

/// Decides whether `theta` lies in `Theta(d, d0, k)` up to `tol` (scaled by
/// `max(1, max |theta|)`), and if so returns a witness knot vector.
///
/// A segment is accepted when its least-squares residual norm is within the
/// tolerance, which bounds every pointwise residual. A candidate knot for
/// `d0 >= 0` must admit a smooth two-piece fit to the `d+1` points on each
/// side of it; the final witness is confirmed by a constrained refit.
pub fn check_membership(theta: &[f64], params: &ModelParams, tol: f64) -> Result<Membership> {
    let n = theta.len();
    if n != params.n {
        return Err(Error::param(format!(
            "signal length {n} does not match n = {}",
            params.n
        )));
    }
    let d = params.d;
    let p = d + 1;
    if n < p {
        return Ok(Membership::no());
    }
    let scale = theta.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol_eff = tol * scale;
    let nf = n as f64;

    // Longest exact segment starting after each grid point.
    let mut max_end = vec![0usize; n + 1];
    for t in 0..=n - p {
        let mut run = RunningLeastSquares::new(p);
        let mut end = t;
        for i in t + 1..=n {
            run.push((i - t) as f64 / nf, theta[i - 1]);
            if run.rows() > p && run.sse() > tol_eff * tol_eff {
                break;
            }
            end = i;
        }
        max_end[t] = end;
    }

    let shared = (params.d0 + 1) as usize;
    // Local misfit of a knot at t; None when the knot is not admissible.
    let knot_misfit = |t: usize| -> Option<f64> {
        if t == 0 || shared == 0 {
            return Some(0.0);
        }
        if t < p || t + p > n {
            return None;
        }
        joint_residual(theta, t, d, shared).filter(|&r| r <= tol_eff)
    };
    let misfit: Vec<Option<f64>> = (0..=n).map(knot_misfit).collect();

    // Fewest pieces first; among those, the smallest total knot misfit, so
    // that a weak knot is not shifted onto a neighbouring grid point that
    // happens to pass the local test.
    let mut reach = vec![usize::MAX; n + 1];
    let mut cost = vec![f64::INFINITY; n + 1];
    let mut from = vec![0usize; n + 1];
    reach[0] = 0;
    cost[0] = 0.0;
    for j in p..=n {
        for t in 0..=j - p {
            let Some(m) = misfit[t] else {
                continue;
            };
            if reach[t] == usize::MAX || max_end[t] < j {
                continue;
            }
            let (r, c) = (reach[t] + 1, cost[t] + m);
            if r < reach[j] || (r == reach[j] && c < cost[j]) {
                reach[j] = r;
                cost[j] = c;
                from[j] = t;
            }
        }
    }
    if reach[n] > params.k {
        return Ok(Membership::no());
    }
    let mut knots = vec![n];
    let mut j = n;
    while j > 0 {
        j = from[j];
        knots.push(j);
    }
    knots.reverse();
    let witness = validate_knots(&knots, d, n)?;
    let fit = fit_given_knots(theta, &params.with_k(witness.pieces()), &witness)?;
    let worst = fit
        .theta_hat
        .iter()
        .zip(theta)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if worst > tol_eff {
        return Ok(Membership::no());
    }
    Ok(Membership {
        member: true,
        witness: Some(witness),
    })
}

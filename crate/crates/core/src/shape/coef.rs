use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::canonical::random_canonical;
use super::fit::fit_shape_given_knots;
use crate::error::{Error, Result};
use crate::model::{check_membership, ModelParams, DEFAULT_MEMBERSHIP_TOL};

/// `sqrt(n) * max_l |c_l|` for the canonical form of `theta / |theta|`.
///
/// The knots come from a membership witness in `Theta(d, d-1, k)`; the pivot
/// is the smallest one whose sign-constrained refit reproduces the signal.
pub fn coef_bound_statistic(theta: &[f64], d: usize, k: usize) -> Result<f64> {
    let n = theta.len();
    let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let unit: Vec<f64> = theta.iter().map(|v| v / norm).collect();
    let params = ModelParams::new(d, d as i32 - 1, k, n, 0.0)?;
    let member = check_membership(&unit, &params, DEFAULT_MEMBERSHIP_TOL)?;
    let Some(knots) = member.witness else {
        return Err(Error::NotAMember(format!("no spline with {k} pieces of degree {d}")));
    };
    for j_star in 0..=knots.pieces() {
        let fit = fit_shape_given_knots(&unit, d, &knots, j_star)?;
        let worst = fit
            .fit
            .theta_hat
            .iter()
            .zip(&unit)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if worst <= DEFAULT_MEMBERSHIP_TOL {
            let cmax = fit.canonical.c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            return Ok(cmax * (n as f64).sqrt());
        }
    }
    Err(Error::NotAMember(format!("signal is not {d}-monotone")))
}

/// Empirical constant for [`coef_bound_statistic`], with its provenance.
#[derive(Debug, Clone, Serialize)]
pub struct CoefCalibration {
    pub constant: f64,
    pub observed_max: f64,
    pub margin: f64,
    pub seed: u64,
    pub instances: usize,
    pub degrees: Vec<usize>,
    pub sizes: Vec<usize>,
    pub max_pieces: usize,
}

/// Draws a random unit-norm member of `Theta*(d, k)` together with `k`.
pub fn random_unit_member<R: Rng>(rng: &mut R, d: usize, max_pieces: usize, n: usize) -> Result<(Vec<f64>, usize)> {
    loop {
        let k = rng.random_range(1..=max_pieces.min(n / (d + 1)));
        let rep = random_canonical(rng, d, k, n)?;
        let theta = rep.evaluate();
        let norm = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            return Ok((theta.iter().map(|v| v / norm).collect(), k));
        }
    }
}

/// Scans `instances` random members per `(d, n)` cell and sets the bound to
/// `margin` times the largest statistic seen.
pub fn calibrate_coef_bound(
    degrees: &[usize],
    sizes: &[usize],
    max_pieces: usize,
    instances: usize,
    seed: u64,
    margin: f64,
) -> Result<CoefCalibration> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut observed_max: f64 = 0.0;
    for &d in degrees {
        for &n in sizes {
            for _ in 0..instances {
                let (theta, k) = random_unit_member(&mut rng, d, max_pieces, n)?;
                observed_max = observed_max.max(coef_bound_statistic(&theta, d, k)?);
            }
        }
    }
    Ok(CoefCalibration {
        constant: margin * observed_max,
        observed_max,
        margin,
        seed,
        instances: instances * degrees.len() * sizes.len(),
        degrees: degrees.to_vec(),
        sizes: sizes.to_vec(),
        max_pieces,
    })
}

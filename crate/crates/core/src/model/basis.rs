use nalgebra::DMatrix;

use super::knots::KnotVector;
use super::params::ModelParams;
use super::piecewise::PiecewiseSpline;
use crate::error::{Error, Result};
use crate::linalg::{positive_power, shift_polynomial};

fn check_context(params: &ModelParams, knots: &KnotVector) -> Result<()> {
    if knots.n() != params.n {
        return Err(Error::param(format!(
            "knots end at {} but n = {}",
            knots.n(),
            params.n
        )));
    }
    if knots.degree() != params.d {
        return Err(Error::param(format!(
            "knots validated for degree {} but d = {}",
            knots.degree(),
            params.d
        )));
    }
    Ok(())
}

pub fn basis_dim(params: &ModelParams, knots: &KnotVector) -> usize {
    params.d + 1 + knots.inner_knots().len() * params.jump_dim()
}

/// Truncated power design: `(t/n)^l` for `l` in `0..=d`, then
/// `((t - n_j)/n)_+^l` for `l` in `d0+1..=d` at each distinct inner knot.
/// With `d0 = -1` the `l = 0` column is the indicator of `t > n_j`.
pub fn basis_matrix(params: &ModelParams, knots: &KnotVector) -> Result<DMatrix<f64>> {
    check_context(params, knots)?;
    let n = params.n;
    let nf = n as f64;
    let d = params.d;
    let first_jump = (params.d0 + 1) as usize;
    let inner = knots.inner_knots();
    let cols = basis_dim(params, knots);
    let mut x = DMatrix::zeros(n, cols);
    for t in 1..=n {
        let u = t as f64 / nf;
        let row = t - 1;
        let mut col = 0;
        for l in 0..=d {
            x[(row, col)] = u.powi(l as i32);
            col += 1;
        }
        for &knot in &inner {
            let v = (t as f64 - knot as f64) / nf;
            for l in first_jump..=d {
                x[(row, col)] = positive_power(v, l);
                col += 1;
            }
        }
    }
    Ok(x)
}

/// Converts global truncated-power coefficients (column order of
/// [`basis_matrix`]) to the per-piece shifted form.
pub fn piecewise_from_global(
    params: &ModelParams,
    knots: &KnotVector,
    coef: &[f64],
) -> Result<PiecewiseSpline> {
    check_context(params, knots)?;
    let d = params.d;
    let nf = params.n as f64;
    let first_jump = (params.d0 + 1) as usize;
    if coef.len() != basis_dim(params, knots) {
        return Err(Error::param(format!(
            "{} coefficients for a basis of dimension {}",
            coef.len(),
            basis_dim(params, knots)
        )));
    }
    let global = &coef[..=d];
    let inner = knots.inner_knots();
    let jumps: Vec<Vec<f64>> = inner
        .iter()
        .enumerate()
        .map(|(j, _)| {
            let mut h = vec![0.0; d + 1];
            let off = d + 1 + j * params.jump_dim();
            h[first_jump..=d].copy_from_slice(&coef[off..off + params.jump_dim()]);
            h
        })
        .collect();
    let mut spline = PiecewiseSpline::zero(knots.clone());
    for (p, start, _) in knots.nonempty_pieces() {
        let s = start as f64 / nf;
        let mut acc = shift_polynomial(global, 0.0, s);
        for (h, &knot) in jumps.iter().zip(&inner) {
            if knot > start {
                break;
            }
            let shifted = shift_polynomial(h, knot as f64 / nf, s);
            for (a, b) in acc.iter_mut().zip(shifted) {
                *a += b;
            }
        }
        spline.coeffs[p] = acc;
    }
    Ok(spline)
}

/// Inverse of [`piecewise_from_global`]. Shared coefficients (orders up to
/// `d0`) are taken from the left piece; any mismatch on the right is dropped.
pub fn global_from_piecewise(params: &ModelParams, spline: &PiecewiseSpline) -> Result<Vec<f64>> {
    check_context(params, &spline.knots)?;
    let nf = params.n as f64;
    let first_jump = (params.d0 + 1) as usize;
    let pieces = spline.knots.nonempty_pieces();
    let (p0, _, _) = pieces[0];
    let mut coef = spline.coeffs[p0].clone();
    let mut current = coef.clone();
    let mut current_start = 0.0;
    for &(p, start, _) in &pieces[1..] {
        let s = start as f64 / nf;
        let mut extended = shift_polynomial(&current, current_start, s);
        for l in first_jump..extended.len() {
            let jump = spline.coeffs[p][l] - extended[l];
            coef.push(jump);
            extended[l] += jump;
        }
        current = extended;
        current_start = s;
    }
    Ok(coef)
}

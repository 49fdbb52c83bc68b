use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::beta::beta_table;
use super::Calibration;
use crate::error::{Error, Result};
use crate::model::{
    basis_dim, piecewise_from_global, transition_boundary, validate_knots, ModelParams,
    PiecewiseSpline,
};

/// Quadratic forms obtained by cancelling `s` times from the last inner
/// knot:
/// `sum_i ((n - n_{k0-1})^(2i-1) / n^(2(i-1))) (sum_j beta^s_{i,j} a^{k0-1-s}_{i+j})^2`.
///
/// The spline must have unit norm, exactly `k0` nonempty pieces, and end
/// pieces at least as long as every middle piece.
pub fn quad_form_residuals(spline: &PiecewiseSpline, d0: i32, s: usize) -> Result<f64> {
    let d = spline.degree();
    let k0 = transition_boundary(d, d0)?;
    let knots = &spline.knots;
    if knots.pieces() != k0 || knots.nonempty_count() != k0 {
        return Err(Error::Precondition(format!("need {k0} nonempty pieces")));
    }
    let norm_sq: f64 = spline.evaluate().iter().map(|v| v * v).sum();
    if (norm_sq - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("squared norm is {norm_sq}, not 1")));
    }
    let kn = knots.as_slice();
    let gaps: Vec<usize> = kn.windows(2).map(|w| w[1] - w[0]).collect();
    let middle = gaps[1..k0 - 1].iter().copied().max().unwrap_or(0);
    if gaps[0].min(gaps[k0 - 1]) < middle {
        return Err(Error::Precondition(
            "end pieces must be at least as long as every middle piece".into(),
        ));
    }
    let table = beta_table(d, d0, knots)?;
    if s > table.s_max() {
        return Err(Error::param(format!("s = {s} exceeds {}", table.s_max())));
    }
    let m = table.jump();
    let n = knots.n() as f64;
    let last = n - kn[k0 - 1] as f64;
    let a = &spline.coeffs[k0 - 1 - s];
    let mut total = 0.0;
    for i in 1..=d + 1 - s * m {
        let weight = last * (last / n).powi(2 * (i as i32 - 1));
        let inner: f64 = (0..=s * m).map(|j| table.combined(s, i, j) * a[i + j - 1]).sum();
        total += weight * inner * inner;
    }
    Ok(total)
}

/// Random unit-norm member of `Theta(d, d0, k0)` satisfying the end-piece
/// condition. Gaps and coefficients are drawn on logarithmic scales.
pub fn random_end_long_spline<R: Rng>(rng: &mut R, d: usize, d0: i32) -> Result<PiecewiseSpline> {
    let k0 = transition_boundary(d, d0)?;
    let p = d + 1;
    let middle: Vec<usize> = (0..k0 - 2)
        .map(|_| p + 10f64.powf(rng.random_range(0.0..2.0)) as usize)
        .collect();
    let longest = middle.iter().copied().max().unwrap_or(p);
    let mut knots = vec![0, longest + 10f64.powf(rng.random_range(0.0..2.0)) as usize];
    for g in middle {
        knots.push(knots.last().unwrap() + g);
    }
    knots.push(knots.last().unwrap() + longest + 10f64.powf(rng.random_range(0.0..2.0)) as usize);
    let n = *knots.last().unwrap();
    let kv = validate_knots(&knots, d, n)?;
    let params = ModelParams::new(d, d0, k0, n, 0.0)?;
    let coef: Vec<f64> = (0..basis_dim(&params, &kv))
        .map(|_| {
            let mag = 10f64.powf(rng.random_range(-1.0..2.0));
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let mut spline = piecewise_from_global(&params, &kv, &coef)?;
    let norm = spline.evaluate().iter().map(|v| v * v).sum::<f64>().sqrt();
    for c in spline.coeffs.iter_mut().flatten() {
        *c /= norm;
    }
    Ok(spline)
}

/// Largest quadratic-form value over `instances` random splines per degree
/// (`d0 = d - 1`) and every `s`; the reported constant is `margin` times it.
pub fn calibrate_quad_forms(d_max: usize, instances: usize, seed: u64, margin: f64) -> Result<Calibration> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut observed: f64 = 0.0;
    let mut count = 0;
    for d in 1..=d_max {
        let d0 = d as i32 - 1;
        let s_max = (d0 + 1) as usize;
        for _ in 0..instances {
            let spline = random_end_long_spline(&mut rng, d, d0)?;
            for s in 0..=s_max {
                let v = quad_form_residuals(&spline, d0, s)?;
                if !v.is_finite() {
                    return Err(Error::Degenerate(format!("non-finite quadratic form at d = {d}")));
                }
                observed = observed.max(v);
            }
            count += 1;
        }
    }
    Ok(Calibration {
        name: "quad_forms".into(),
        constant: margin * observed,
        observed,
        margin,
        seed,
        instances: count,
        grid: format!("1 <= d <= {d_max}, d0 = d - 1, all s"),
    })
}

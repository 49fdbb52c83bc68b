use super::{segment_cost, tie_slack, FitResult};
use crate::error::{Error, Result};
use crate::linalg::RunningLeastSquares;
use crate::model::{validate_knots, ModelParams, PiecewiseSpline};

/// Optimal partitioning for discontinuous splines (`d0 = -1`).
pub fn dp_fit(y: &[f64], params: &ModelParams) -> Result<FitResult> {
    let mut path = dp_path(y, params)?;
    Ok(path.pop().expect("path has k entries"))
}

/// Fits for every piece budget `1..=params.k` from a single pass.
///
/// `best[m][j]` is the least SSE of `y[..j]` split into exactly `m` pieces.
/// Rows are filled by sweeping the segment start `t` upward: once all starts
/// below `t` are processed, `best[.][t]` is final, and one running
/// least-squares sweep from `t` scores every segment `(t, j]`.
pub fn dp_path(y: &[f64], params: &ModelParams) -> Result<Vec<FitResult>> {
    if params.d0 != -1 {
        return Err(Error::param("dynamic programming requires d0 = -1"));
    }
    let n = y.len();
    if n != params.n {
        return Err(Error::param(format!(
            "signal length {n} does not match n = {}",
            params.n
        )));
    }
    let d = params.d;
    let p = d + 1;
    if n < p {
        return Err(Error::InfeasibleSegment { len: n, degree: d });
    }
    let kmax = params.k;
    let nf = n as f64;
    let mut best = vec![vec![f64::INFINITY; n + 1]; kmax + 1];
    let mut arg = vec![vec![usize::MAX; n + 1]; kmax + 1];
    best[0][0] = 0.0;
    let mut run = RunningLeastSquares::new(p);
    for t in 0..=n - p {
        if (0..kmax).all(|m| best[m][t].is_infinite()) {
            continue;
        }
        run = RunningLeastSquares::new(p);
        for j in t + 1..=n {
            run.push((j - t) as f64 / nf, y[j - 1]);
            if j - t < p {
                continue;
            }
            let cost = run.sse();
            for m in 1..=kmax {
                let prev = best[m - 1][t];
                if prev.is_finite() && prev + cost < best[m][j] {
                    best[m][j] = prev + cost;
                    arg[m][j] = t;
                }
            }
        }
    }
    drop(run);

    let slack = tie_slack(y);
    let mut out = Vec::with_capacity(kmax);
    let mut chosen = 0usize;
    for k in 1..=kmax {
        if best[k][n].is_finite() && (chosen == 0 || best[k][n] < best[chosen][n] - slack) {
            chosen = k;
        }
        let mut knots = vec![n];
        let mut j = n;
        for m in (1..=chosen).rev() {
            j = arg[m][j];
            knots.push(j);
        }
        knots.extend(std::iter::repeat_n(0, k - chosen));
        knots.reverse();
        let kv = validate_knots(&knots, d, n)?;
        out.push(assemble(y, &kv, k)?);
    }
    Ok(out)
}

/// Independent per-segment fits on the given knots.
fn assemble(y: &[f64], knots: &crate::model::KnotVector, k: usize) -> Result<FitResult> {
    let n = y.len();
    let mut spline = PiecewiseSpline::zero(knots.clone());
    let mut theta = Vec::with_capacity(n);
    for (piece, start, end) in knots.nonempty_pieces() {
        let fit = segment_cost(&y[start..end], knots.degree())?;
        for u in 1..=end - start {
            theta.push(crate::linalg::horner(&fit.coeffs, u as f64));
        }
        spline.coeffs[piece] = fit.scaled_coeffs(n);
    }
    Ok(FitResult::from_theta(y, theta, spline, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_level_step() {
        let y = [0.0, 0.0, 0.0, 5.0, 5.0, 5.0];
        let p = ModelParams::new(0, -1, 2, 6, 1.0).unwrap();
        let f = dp_fit(&y, &p).unwrap();
        assert_eq!(f.knots().as_slice(), &[0, 3, 6]);
        assert!(f.sse < 1e-20);
    }

    #[test]
    fn single_piece_is_segment_cost() {
        let y = [0.4, -1.0, 2.2, 0.3, 0.9, 1.7, -0.5];
        let p = ModelParams::new(1, -1, 1, 7, 1.0).unwrap();
        let f = dp_fit(&y, &p).unwrap();
        let s = segment_cost(&y, 1).unwrap();
        assert!((f.sse - s.sse).abs() < 1e-12);
    }

    #[test]
    fn unused_pieces_are_padded_empty() {
        let y = [1.0; 8];
        let p = ModelParams::new(0, -1, 3, 8, 1.0).unwrap();
        let f = dp_fit(&y, &p).unwrap();
        assert_eq!(f.knots().as_slice(), &[0, 0, 0, 8]);
        assert_eq!(f.k_selected, 3);
    }

    #[test]
    fn pieces_and_theta_agree() {
        let y = [0.1, 0.5, -0.2, 3.0, 3.3, 2.9, 3.1, -1.0, -1.2, -0.8];
        let p = ModelParams::new(1, -1, 3, 10, 1.0).unwrap();
        let f = dp_fit(&y, &p).unwrap();
        let again = f.spline.evaluate();
        for (a, b) in again.iter().zip(&f.theta_hat) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn continuity_is_rejected() {
        let p = ModelParams::new(1, 0, 2, 6, 1.0).unwrap();
        assert!(dp_fit(&[0.0; 6], &p).is_err());
    }
}

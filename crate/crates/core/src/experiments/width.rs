use serde::Serialize;

use super::{check_grid, log_rate, loglog_rate, mean_se, noise, stream_id};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::solvers::{count_configurations, dp_fit, exhaustive_fit};

/// One row of the width curve CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthRow {
    pub n: usize,
    pub d: usize,
    pub d0: i32,
    pub k: usize,
    pub mean_width: f64,
    pub std_error: f64,
    pub loglog16n: f64,
    pub log_en: f64,
    pub reps: usize,
    pub seed: u64,
}

/// `sup (eps . theta)^2` over unit-norm members of the class.
///
/// The class is a union of linear spaces indexed by knot vectors, so the
/// supremum is the largest squared projection of `eps`, which equals
/// `|eps|^2` minus the residual of the least-squares fit. Step functions with
/// at most three pieces use prefix sums directly; other discontinuous
/// classes go through the dynamic program, and continuous ones through
/// enumeration subject to `budget`.
pub fn complexity_width(eps: &[f64], params: &ModelParams, budget: u128) -> Result<f64> {
    if eps.len() != params.n {
        return Err(Error::param(format!(
            "noise has length {}, expected n = {}",
            eps.len(),
            params.n
        )));
    }
    let total: f64 = eps.iter().map(|v| v * v).sum();
    if params.d == 0 && params.d0 == -1 && params.k <= 3 {
        return Ok(step_width(eps, params.k));
    }
    let sse = if params.d0 == -1 {
        dp_fit(eps, params)?.sse
    } else {
        let count = count_configurations(params.n, params.d, params.k);
        if count > budget {
            return Err(Error::BudgetExceeded { count, budget });
        }
        exhaustive_fit(eps, params, budget)?.sse
    };
    Ok((total - sse).max(0.0))
}

fn step_width(eps: &[f64], k: usize) -> f64 {
    let n = eps.len();
    let mut prefix = vec![0.0; n + 1];
    for (i, v) in eps.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    // Squared projection onto the constant on (a, b].
    let seg = |a: usize, b: usize| {
        let s = prefix[b] - prefix[a];
        s * s / (b - a) as f64
    };
    let one = seg(0, n);
    if k == 1 {
        return one;
    }
    if k == 2 {
        return (1..n).map(|a| seg(0, a) + seg(a, n)).fold(one, f64::max);
    }
    // best2[b]: largest projection of eps[..b] on at most two pieces.
    let mut best2 = vec![0.0; n + 1];
    for b in 1..=n {
        let mut m = seg(0, b);
        for a in 1..b {
            let v = seg(0, a) + seg(a, b);
            if v > m {
                m = v;
            }
        }
        best2[b] = m;
    }
    let mut best = best2[n];
    for b in 1..n {
        let v = best2[b] + seg(b, n);
        if v > best {
            best = v;
        }
    }
    best
}

/// Mean width under standard normal noise for each `n` in the grid.
pub fn width_curve(
    n_grid: &[usize],
    d: usize,
    d0: i32,
    k: usize,
    reps: usize,
    seed: u64,
    budget: u128,
) -> Result<Vec<WidthRow>> {
    check_grid(n_grid, reps)?;
    n_grid
        .iter()
        .map(|&n| {
            let params = ModelParams::new(d, d0, k, n, 1.0)?;
            let w = (0..reps)
                .map(|r| complexity_width(&noise(n, seed, stream_id(n, r)), &params, budget))
                .collect::<Result<Vec<_>>>()?;
            let (mean_width, std_error) = mean_se(&w);
            Ok(WidthRow {
                n,
                d,
                d0,
                k,
                mean_width,
                std_error,
                loglog16n: loglog_rate(n, 1),
                log_en: log_rate(n, 1),
                reps,
                seed,
            })
        })
        .collect()
}

use serde::Serialize;

use super::{check_grid, loglog_rate, mean_se, noise, stream_id};
use crate::error::{Error, Result};

/// One row of the LIL curve CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LilRow {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "mean_Z2")]
    pub mean_z2: f64,
    pub std_error: f64,
    pub loglog16n: f64,
    pub reps: usize,
    pub seed: u64,
}

/// `max_{1 <= n1 < n2 <= n} |sum_{i in (n1, n2]} (i - n1)^d eps_i|
///   / ((n2 - n1)^d sqrt(min(n2, n - n1)))`.
///
/// For each left end the weighted sum is carried forward as the right end
/// grows, so every pair costs O(1) after the O(d) weight.
pub fn lil_statistic(eps: &[f64], d: usize) -> Result<f64> {
    let n = eps.len();
    if n < 2 {
        return Err(Error::param("the statistic needs at least two observations"));
    }
    let mut best = 0.0f64;
    let mut w = vec![0.0; n + 1];
    for n1 in 1..n {
        let tail = (n - n1) as f64;
        for (m, slot) in w.iter_mut().enumerate().take(n - n1 + 1).skip(1) {
            *slot = (m as f64).powi(d as i32);
        }
        let mut s = 0.0;
        for n2 in n1 + 1..=n {
            let m = n2 - n1;
            s += w[m] * eps[n2 - 1];
            let den = w[m] * w[m] * (n2 as f64).min(tail);
            let v = s * s / den;
            if v > best {
                best = v;
            }
        }
    }
    Ok(best.sqrt())
}

/// Direct double loop over pairs; the reference for [`lil_statistic`].
pub fn lil_statistic_naive(eps: &[f64], d: usize) -> f64 {
    let n = eps.len();
    let mut best = 0.0f64;
    for n1 in 1..n {
        for n2 in n1 + 1..=n {
            let num: f64 = (n1 + 1..=n2)
                .map(|i| ((i - n1) as f64).powi(d as i32) * eps[i - 1])
                .sum();
            let den = ((n2 - n1) as f64).powi(d as i32) * (n2.min(n - n1) as f64).sqrt();
            best = best.max(num.abs() / den);
        }
    }
    best
}

/// Mean of `Z^2` under standard normal noise for each `n` in the grid.
pub fn lil_curve(n_grid: &[usize], d: usize, reps: usize, seed: u64) -> Result<Vec<LilRow>> {
    check_grid(n_grid, reps)?;
    n_grid
        .iter()
        .map(|&n| {
            let z2 = (0..reps)
                .map(|r| lil_statistic(&noise(n, seed, stream_id(n, r)), d).map(|z| z * z))
                .collect::<Result<Vec<_>>>()?;
            let (mean_z2, std_error) = mean_se(&z2);
            Ok(LilRow {
                n,
                d,
                mean_z2,
                std_error,
                loglog16n: loglog_rate(n, 1),
                reps,
                seed,
            })
        })
        .collect()
}

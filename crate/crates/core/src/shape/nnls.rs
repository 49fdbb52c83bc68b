use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::least_squares;

/// Dual feasibility tolerance, relative to the norm of the projected response.
pub const DUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution {
    pub free: Vec<f64>,
    pub nonneg: Vec<f64>,
    pub iterations: usize,
}

/// Minimizes `|y - F u - A v|^2` over unconstrained `u` and `v >= 0`.
///
/// The free block is removed by projecting onto the orthogonal complement
/// of its columns; the remaining problem is solved with the Lawson-Hanson
/// active-set method on unit-norm columns until the KKT conditions hold.
/// The iteration cap is `100 * (number of variables)`.
pub fn mixed_nnls(free: &DMatrix<f64>, nonneg: &DMatrix<f64>, y: &DVector<f64>) -> Result<NnlsSolution> {
    let n = y.len();
    let pf = free.ncols();
    let pa = nonneg.ncols();
    let (y_proj, a_proj) = if pf > 0 {
        let q = free.clone().qr().q();
        let y_proj = y - &q * (q.transpose() * y);
        let a_proj = nonneg - &q * (q.transpose() * nonneg);
        (y_proj, a_proj)
    } else {
        (y.clone(), nonneg.clone())
    };

    let norms: Vec<f64> = (0..pa).map(|j| a_proj.column(j).norm()).collect();
    let max_norm = norms.iter().fold(0.0f64, |m, &v| m.max(v));
    // Columns inside the free span cannot move the fit; pin them at zero.
    let usable: Vec<bool> = norms.iter().map(|&v| v > 1e-12 * max_norm.max(1e-300)).collect();
    let mut b = DMatrix::zeros(n, pa);
    for j in 0..pa {
        if usable[j] {
            b.set_column(j, &(a_proj.column(j) / norms[j]));
        }
    }

    let cap = 100 * (pf + pa).max(1);
    let mut x = vec![0.0; pa];
    let mut passive = vec![false; pa];
    let mut blocked = vec![false; pa];
    let mut iterations = 0;
    let tol = DUAL_TOLERANCE * y_proj.norm();

    let gradient = |x: &[f64]| -> DVector<f64> {
        let fitted = &b * DVector::from_column_slice(x);
        b.transpose() * (&y_proj - fitted)
    };

    if y_proj.norm() > 0.0 && pa > 0 {
        let mut w = gradient(&x);
        loop {
            let candidate = (0..pa)
                .filter(|&j| usable[j] && !passive[j] && !blocked[j])
                .max_by(|&i, &j| w[i].total_cmp(&w[j]));
            let Some(enter) = candidate.filter(|&j| w[j] > tol) else {
                break;
            };
            passive[enter] = true;
            loop {
                iterations += 1;
                if iterations > cap {
                    return Err(Error::NotConverged { iterations: cap });
                }
                let idx: Vec<usize> = (0..pa).filter(|&j| passive[j]).collect();
                let sub = b.select_columns(&idx);
                let z_sub = least_squares(&sub, &y_proj)?;
                let mut z = vec![0.0; pa];
                for (pos, &j) in idx.iter().enumerate() {
                    z[j] = z_sub[pos];
                }
                if idx.iter().all(|&j| z[j] > 0.0) {
                    x = z;
                    break;
                }
                let mut alpha = f64::INFINITY;
                for &j in &idx {
                    if z[j] <= 0.0 {
                        let denom = x[j] - z[j];
                        if denom > 0.0 {
                            alpha = alpha.min(x[j] / denom);
                        } else {
                            alpha = 0.0;
                        }
                    }
                }
                for &j in &idx {
                    x[j] += alpha * (z[j] - x[j]);
                    if x[j] <= 0.0 || (z[j] <= 0.0 && x[j] <= 1e-15) {
                        x[j] = 0.0;
                        passive[j] = false;
                    }
                }
                if !idx.iter().any(|&j| passive[j]) {
                    break;
                }
            }
            let entered = passive[enter];
            w = gradient(&x);
            if entered {
                blocked.iter_mut().for_each(|v| *v = false);
            } else {
                // The entering column was expelled at once: rounding, not progress.
                blocked[enter] = true;
            }
        }
    }

    let nonneg_coef: Vec<f64> = (0..pa)
        .map(|j| if usable[j] { x[j] / norms[j] } else { 0.0 })
        .collect();
    let free_coef = if pf > 0 {
        let resid = y - nonneg * DVector::from_column_slice(&nonneg_coef);
        least_squares(free, &resid)?.iter().copied().collect()
    } else {
        Vec::new()
    };
    Ok(NnlsSolution {
        free: free_coef,
        nonneg: nonneg_coef,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exact NNLS by checking every support set.
    fn subset_oracle(a: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
        let p = a.ncols();
        let mut best = y.norm_squared();
        for mask in 1u32..(1 << p) {
            let idx: Vec<usize> = (0..p).filter(|j| mask >> j & 1 == 1).collect();
            let sub = a.select_columns(&idx);
            if let Ok(z) = least_squares(&sub, y) {
                if z.iter().all(|&v| v >= 0.0) {
                    best = best.min((y - &sub * z).norm_squared());
                }
            }
        }
        best
    }

    #[test]
    fn matches_subset_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let n = rng.random_range(6..14);
            let p = rng.random_range(1..6);
            let a = DMatrix::from_fn(n, p, |_, _| rng.random_range(-1.0..1.0));
            let y = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let sol = mixed_nnls(&DMatrix::zeros(n, 0), &a, &y).unwrap();
            assert!(sol.nonneg.iter().all(|&v| v >= 0.0));
            let sse = (&y - &a * DVector::from_column_slice(&sol.nonneg)).norm_squared();
            assert!((sse - subset_oracle(&a, &y)).abs() < 1e-10);
        }
    }

    #[test]
    fn free_block_is_unconstrained() {
        // y = -2 * ones; a free intercept absorbs it even though v >= 0.
        let n = 5;
        let f = DMatrix::from_element(n, 1, 1.0);
        let a = DMatrix::from_fn(n, 1, |i, _| i as f64);
        let y = DVector::from_element(n, -2.0);
        let sol = mixed_nnls(&f, &a, &y).unwrap();
        assert!((sol.free[0] + 2.0).abs() < 1e-12);
        assert!(sol.nonneg[0].abs() < 1e-12);
    }
}

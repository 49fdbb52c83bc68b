use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// `A_ij = m^-(i+j-1) sum_{t=1}^m t^(i+j-2)` for `i, j` in `1..=d+1`: the
/// Gram matrix of monomials at the points `t/m`, divided by `m`.
pub fn moment_matrix(m: usize, d: usize) -> Result<DMatrix<f64>> {
    if m <= d {
        return Err(Error::Degenerate(format!("m = {m} points cannot separate degree {d}")));
    }
    let p = d + 1;
    let mf = m as f64;
    let mut sums = vec![0.0; 2 * p - 1];
    for t in 1..=m {
        let u = t as f64 / mf;
        let mut v = 1.0;
        for s in sums.iter_mut() {
            *s += v;
            v *= u;
        }
    }
    Ok(DMatrix::from_fn(p, p, |i, j| sums[i + j] / mf))
}

pub fn moment_matrix_lambda_min(m: usize, d: usize) -> Result<f64> {
    let a = moment_matrix(m, d)?;
    Ok(SymmetricEigen::new(a).eigenvalues.min())
}

/// Limit `1/(i+j-1)` of the moment matrix as `m` grows.
pub fn hilbert_limit(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d + 1, d + 1, |i, j| 1.0 / (i + j + 1) as f64)
}

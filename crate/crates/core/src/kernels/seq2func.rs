use nalgebra::{DMatrix, SymmetricEigen};

use super::Calibration;
use crate::error::{Error, Result};

/// Smallest ratio `sum_{u=1}^m g(u/m)^2 / (m int_0^1 g^2)` over polynomials
/// `g` of degree `d`, i.e. the discrete-to-integral ratio on one piece of
/// `m` grid points. It is scale free in `n`.
pub fn seq2func_piece_ratio(m: usize, d: usize) -> Result<f64> {
    if m <= d {
        return Err(Error::Degenerate(format!("m = {m} points cannot separate degree {d}")));
    }
    let p = d + 1;
    let mf = m as f64;
    let disc = DMatrix::from_fn(p, p, |i, j| {
        (1..=m).map(|u| (u as f64 / mf).powi((i + j) as i32)).sum::<f64>()
    });
    let int = DMatrix::from_fn(p, p, |i, j| mf / (i + j + 1) as f64);
    // Symmetric reduction of the generalized problem disc v = lambda int v.
    let chol = int
        .cholesky()
        .ok_or_else(|| Error::Degenerate("integral Gram matrix not positive definite".into()))?;
    let l_inv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular Cholesky factor".into()))?;
    let reduced = &l_inv * disc * l_inv.transpose();
    let sym = (&reduced + reduced.transpose()) * 0.5;
    Ok(SymmetricEigen::new(sym).eigenvalues.min())
}

/// Minimum of [`seq2func_piece_ratio`] over piece lengths `d+1..=m_max`.
/// Pieces add up, so this bounds the ratio for every spline whose pieces
/// have at most `m_max` points; longer pieces approach ratio 1.
pub fn seq2func_constant(d: usize, m_max: usize) -> Result<Calibration> {
    let mut observed = f64::INFINITY;
    for m in d + 1..=m_max {
        observed = observed.min(seq2func_piece_ratio(m, d)?);
    }
    Ok(Calibration {
        name: format!("seq2func_d{d}"),
        constant: observed,
        observed,
        margin: 1.0,
        seed: 0,
        instances: m_max - d,
        grid: format!("piece lengths {}..={m_max}", d + 1),
    })
}

//! Small dense numerical helpers shared by the solvers.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative singular-value cutoff below which a design is declared rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Falling factorial `m (m-1) ... (m-r+1)`; equals 1 for `r = 0`.
pub fn falling(m: usize, r: usize) -> f64 {
    (0..r).map(|i| m as f64 - i as f64).product()
}

/// Rising factorial `m (m+1) ... (m+r-1)`; equals 1 for `r = 0`.
pub fn rising(m: usize, r: usize) -> f64 {
    (0..r).map(|i| (m + i) as f64).product()
}

pub fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

/// Truncated power `(u)_+^p`. For `p = 0` this is the indicator of `u > 0`.
pub fn positive_power(u: f64, p: usize) -> f64 {
    if u > 0.0 {
        u.powi(p as i32)
    } else {
        0.0
    }
}

/// Re-centres a polynomial `sum_m c_m (x - from)^m` at `to`.
pub fn shift_polynomial(coeffs: &[f64], from: f64, to: f64) -> Vec<f64> {
    let delta = to - from;
    let p = coeffs.len();
    let mut out = vec![0.0; p];
    // (x - from)^l = ((x - to) + delta)^l
    for (l, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for (m, slot) in out.iter_mut().enumerate().take(l + 1) {
            *slot += c * binomial(l, m) * delta.powi((l - m) as i32);
        }
    }
    out
}

pub fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

/// Least squares via an SVD of the column-equilibrated design.
///
/// Columns are scaled to unit norm before the decomposition so that the
/// rank test sees the geometry of the column span rather than the units of
/// individual basis functions.
pub fn least_squares(design: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let (rows, cols) = design.shape();
    if cols == 0 {
        return Ok(DVector::zeros(0));
    }
    if rows < cols {
        return Err(Error::Degenerate(format!(
            "{rows} observations for {cols} coefficients"
        )));
    }
    let mut scaled = design.clone();
    let mut scales = vec![1.0; cols];
    for (j, scale) in scales.iter_mut().enumerate() {
        let norm = scaled.column(j).norm();
        if norm == 0.0 {
            return Err(Error::Degenerate(format!("basis column {j} is identically zero")));
        }
        *scale = norm;
        scaled.column_mut(j).scale_mut(1.0 / norm);
    }
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= RANK_TOLERANCE * smax {
        return Err(Error::Degenerate(format!(
            "design rank deficient (singular value ratio {:.3e})",
            smin / smax
        )));
    }
    let sol = svd
        .solve(rhs, 0.0)
        .map_err(|e| Error::Degenerate(e.to_string()))?;
    Ok(DVector::from_iterator(
        cols,
        sol.iter().zip(&scales).map(|(v, s)| v / s),
    ))
}

/// Solves `R x = z` for upper-triangular `R` stored row-major (`p x p`).
pub fn back_substitute(r: &[f64], z: &[f64], p: usize) -> Option<Vec<f64>> {
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        let diag = r[i * p + i];
        if diag == 0.0 {
            return None;
        }
        let mut acc = z[i];
        for j in i + 1..p {
            acc -= r[i * p + j] * x[j];
        }
        x[i] = acc / diag;
    }
    Some(x)
}

/// Row-by-row least squares with Givens rotations.
///
/// Fits `y ~ sum_m c_m u^m` for `m < p` as rows `(u, y)` arrive, keeping the
/// triangular factor, the rotated right-hand side, and the running residual
/// sum of squares. Each update costs `O(p^2)`.
#[derive(Debug, Clone)]
pub struct RunningLeastSquares {
    p: usize,
    r: Vec<f64>,
    z: Vec<f64>,
    sse: f64,
    rows: usize,
    row: Vec<f64>,
}

impl RunningLeastSquares {
    pub fn new(p: usize) -> Self {
        Self {
            p,
            r: vec![0.0; p * p],
            z: vec![0.0; p],
            sse: 0.0,
            rows: 0,
            row: vec![0.0; p],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn sse(&self) -> f64 {
        self.sse.max(0.0)
    }

    /// Adds the observation `y` at abscissa `u` with a monomial design row.
    pub fn push(&mut self, u: f64, y: f64) {
        let mut v = 1.0;
        for slot in self.row.iter_mut() {
            *slot = v;
            v *= u;
        }
        let mut row = std::mem::take(&mut self.row);
        self.push_row(&mut row, y);
        self.row = row;
    }

    fn push_row(&mut self, x: &mut [f64], mut y: f64) {
        let p = self.p;
        for k in 0..p {
            let xk = x[k];
            if xk == 0.0 {
                continue;
            }
            let rkk = self.r[k * p + k];
            let h = rkk.hypot(xk);
            let c = rkk / h;
            let s = xk / h;
            self.r[k * p + k] = h;
            for j in k + 1..p {
                let rkj = self.r[k * p + j];
                let xj = x[j];
                self.r[k * p + j] = c * rkj + s * xj;
                x[j] = -s * rkj + c * xj;
            }
            let zk = self.z[k];
            self.z[k] = c * zk + s * y;
            y = -s * zk + c * y;
        }
        self.sse += y * y;
        self.rows += 1;
    }

    /// Current coefficients in the monomial basis, once the fit is identified.
    pub fn coefficients(&self) -> Option<Vec<f64>> {
        if self.rows < self.p {
            return None;
        }
        back_substitute(&self.r, &self.z, self.p)
    }

    /// Squared norm of the projection of the observed responses onto the span.
    pub fn projection_norm_sq(&self) -> f64 {
        self.z.iter().map(|v| v * v).sum()
    }
}

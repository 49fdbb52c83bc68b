use crate::error::{Error, Result};
use crate::linalg::RunningLeastSquares;

/// Least-squares polynomial on one segment. `coeffs[m]` multiplies `u^m`
/// where `u = 1..=len` is the position inside the segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentFit {
    pub sse: f64,
    pub coeffs: Vec<f64>,
}

impl SegmentFit {
    /// Coefficients of `sum_l a_l (x - start/n)^(l-1)` on the `x = t/n` scale.
    pub fn scaled_coeffs(&self, n: usize) -> Vec<f64> {
        let nf = n as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * nf.powi(m as i32))
            .collect()
    }
}

pub fn segment_cost(y: &[f64], d: usize) -> Result<SegmentFit> {
    let len = y.len();
    if len < d + 1 {
        return Err(Error::InfeasibleSegment { len, degree: d });
    }
    // Fit on u/len in (0, 1] for conditioning, then undo the scaling.
    let lf = len as f64;
    let mut run = RunningLeastSquares::new(d + 1);
    for (i, &v) in y.iter().enumerate() {
        run.push((i + 1) as f64 / lf, v);
    }
    let scaled = run
        .coefficients()
        .ok_or_else(|| Error::Degenerate("segment design is singular".into()))?;
    let coeffs = scaled
        .iter()
        .enumerate()
        .map(|(m, c)| c / lf.powi(m as i32))
        .collect();
    Ok(SegmentFit {
        sse: run.sse(),
        coeffs,
    })
}

use serde::{Deserialize, Serialize};

use super::knots::KnotVector;
use crate::error::{Error, Result};
use crate::linalg::{binomial, falling, horner};

/// Spline stored piece by piece: on `(n_i/n, n_{i+1}/n]` it equals
/// `sum_l a^i_l (x - n_i/n)^(l-1)`, `l = 1..=d+1`. Empty pieces carry an
/// empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseSpline {
    pub knots: KnotVector,
    pub coeffs: Vec<Vec<f64>>,
}

/// Weight of `a^{i-1}_q` in the expansion of `a^i_p` across a knot, where
/// `gap = n_{i;i-1}` is the scaled length of the previous piece.
pub fn transition_coefficient(d: usize, p: usize, q: usize, gap: f64) -> Result<f64> {
    if p == 0 || q == 0 || p > d + 1 || q > d + 1 {
        return Err(Error::param(format!(
            "transition indices (p, q) = ({p}, {q}) outside [1, {}]",
            d + 1
        )));
    }
    if q < p {
        return Ok(0.0);
    }
    Ok(binomial(q - 1, p - 1) * gap.powi((q - p) as i32))
}

impl PiecewiseSpline {
    pub fn new(knots: KnotVector, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        if coeffs.len() != knots.pieces() {
            return Err(Error::param(format!(
                "{} coefficient vectors for {} pieces",
                coeffs.len(),
                knots.pieces()
            )));
        }
        let d = knots.degree();
        for (p, w) in knots.as_slice().windows(2).enumerate() {
            let want = if w[1] > w[0] { d + 1 } else { 0 };
            if coeffs[p].len() != want {
                return Err(Error::param(format!(
                    "piece {p} needs {want} coefficients, got {}",
                    coeffs[p].len()
                )));
            }
        }
        Ok(Self { knots, coeffs })
    }

    pub fn zero(knots: KnotVector) -> Self {
        let d = knots.degree();
        let coeffs = knots
            .as_slice()
            .windows(2)
            .map(|w| if w[1] > w[0] { vec![0.0; d + 1] } else { Vec::new() })
            .collect();
        Self { knots, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.knots.degree()
    }

    pub fn n(&self) -> usize {
        self.knots.n()
    }

    /// Sequence `theta_t = f(t/n)` for `t = 1..=n`.
    pub fn evaluate(&self) -> Vec<f64> {
        let n = self.n();
        let nf = n as f64;
        let mut out = Vec::with_capacity(n);
        for (p, start, end) in self.knots.nonempty_pieces() {
            let a = &self.coeffs[p];
            for t in start + 1..=end {
                out.push(horner(a, (t - start) as f64 / nf));
            }
        }
        out
    }

    /// `r`-th derivative of piece `p` at offset `u` from its left knot (x scale).
    pub fn piece_derivative(&self, p: usize, r: usize, u: f64) -> f64 {
        let a = &self.coeffs[p];
        let mut acc = 0.0;
        for l in (r..a.len()).rev() {
            acc = acc * u + a[l] * falling(l, r);
        }
        acc
    }

    /// Largest relative mismatch of one-sided derivatives of orders `0..=d0`
    /// across the inner knots.
    pub fn derivative_mismatch(&self, d0: i32) -> f64 {
        let pieces = self.knots.nonempty_pieces();
        let mut worst: f64 = 0.0;
        for w in pieces.windows(2) {
            let (pl, sl, el) = w[0];
            let (pr, _, _) = w[1];
            let u = (el - sl) as f64 / self.n() as f64;
            for r in 0..=d0.max(-1) {
                let r = r as usize;
                let left = self.piece_derivative(pl, r, u);
                let right = self.piece_derivative(pr, r, 0.0);
                let scale = left.abs().max(right.abs()).max(1.0);
                worst = worst.max((left - right).abs() / scale);
            }
        }
        worst
    }

    /// Checks `a^i_p = sum_q Coef[a^i_p; a^{i-1}_q] a^{i-1}_q` for the shared
    /// coefficients `p <= d0 + 1` of consecutive nonempty pieces.
    pub fn satisfies_transitions(&self, d0: i32, tol: f64) -> bool {
        let d = self.degree();
        let pieces = self.knots.nonempty_pieces();
        for w in pieces.windows(2) {
            let (pl, sl, el) = w[0];
            let (pr, _, _) = w[1];
            let gap = (el - sl) as f64 / self.n() as f64;
            for p in 1..=(d0 + 1).max(0) as usize {
                let mut predicted = 0.0;
                let mut scale: f64 = 1.0;
                for q in 1..=d + 1 {
                    let term = transition_coefficient(d, p, q, gap).unwrap() * self.coeffs[pl][q - 1];
                    scale = scale.max(term.abs());
                    predicted += term;
                }
                if (predicted - self.coeffs[pr][p - 1]).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_knots;

    #[test]
    fn transition_examples() {
        assert_eq!(transition_coefficient(3, 2, 2, 0.7).unwrap(), 1.0);
        assert_eq!(transition_coefficient(3, 3, 2, 0.7).unwrap(), 0.0);
        let gap = 0.3;
        let v = transition_coefficient(3, 2, 4, gap).unwrap();
        assert!((v - 3.0 * gap * gap).abs() < 1e-15);
        assert!(transition_coefficient(3, 0, 2, gap).is_err());
        assert!(transition_coefficient(3, 1, 5, gap).is_err());
    }

    #[test]
    fn constant_and_identity_pieces() {
        let kv = validate_knots(&[0, 8], 0, 8).unwrap();
        let s = PiecewiseSpline::new(kv, vec![vec![2.5]]).unwrap();
        assert!(s.evaluate().iter().all(|&v| v == 2.5));

        let kv = validate_knots(&[0, 8], 1, 8).unwrap();
        let s = PiecewiseSpline::new(kv, vec![vec![0.0, 1.0]]).unwrap();
        let theta = s.evaluate();
        for (i, v) in theta.iter().enumerate() {
            assert!((v - (i + 1) as f64 / 8.0).abs() < 1e-15);
        }
    }

    #[test]
    fn coefficient_shape_is_checked() {
        let kv = validate_knots(&[0, 4, 4, 8], 1, 8).unwrap();
        assert!(PiecewiseSpline::new(kv.clone(), vec![vec![0.0, 1.0], vec![], vec![1.0, 0.0]]).is_ok());
        assert!(PiecewiseSpline::new(kv, vec![vec![0.0, 1.0], vec![1.0], vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn hat_satisfies_transitions() {
        // Rises with slope 1 over (0, 1/2], falls back over (1/2, 1].
        let kv = validate_knots(&[0, 5, 10], 1, 10).unwrap();
        let s = PiecewiseSpline::new(kv, vec![vec![0.0, 1.0], vec![0.5, -1.0]]).unwrap();
        assert!(s.satisfies_transitions(0, 1e-12));
        assert!(!s.satisfies_transitions(1, 1e-12));
        assert!(s.derivative_mismatch(0) < 1e-12);
    }
}

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{binomial, factorial, positive_power, shift_polynomial};
use crate::model::{validate_knots, KnotVector, PiecewiseSpline};

/// `theta_t = sum_{j=1}^{j*} a_j ((n_j - t)/n)_+^d + sum_{j=j*}^{k-1} b_j ((t - n_j)/n)_+^d
///          + sum_{l<d} c_l/l! (t/n)^l`
/// with `a_j (-1)^(d+1) >= 0` and `b_j >= 0`. For `d = 0` the left power is
/// the indicator of `t <= n_j` and the right one of `t > n_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCanonical {
    pub d: usize,
    pub j_star: usize,
    /// `a_1, ..., a_{j*}`.
    pub a: Vec<f64>,
    /// `b_{j*}, ..., b_{k-1}`.
    pub b: Vec<f64>,
    /// `c_0, ..., c_{d-1}`.
    pub c: Vec<f64>,
    pub knots: KnotVector,
}

pub(crate) fn left_power(knot: usize, t: usize, d: usize, nf: f64) -> f64 {
    if d == 0 {
        if t <= knot {
            1.0
        } else {
            0.0
        }
    } else {
        positive_power((knot as f64 - t as f64) / nf, d)
    }
}

pub(crate) fn right_power(knot: usize, t: usize, d: usize, nf: f64) -> f64 {
    positive_power((t as f64 - knot as f64) / nf, d)
}

pub(crate) fn check_distinct(knots: &KnotVector) -> Result<()> {
    if knots.as_slice().windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::param("canonical form needs strictly increasing knots"));
    }
    Ok(())
}

impl MonotoneCanonical {
    pub fn new(
        d: usize,
        j_star: usize,
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
        knots: KnotVector,
    ) -> Result<Self> {
        check_distinct(&knots)?;
        let k = knots.pieces();
        if j_star > k {
            return Err(Error::param(format!("pivot {j_star} outside [0, {k}]")));
        }
        if a.len() != j_star || b.len() != k - j_star || c.len() != d {
            return Err(Error::param(format!(
                "expected {} a, {} b and {} c coefficients",
                j_star,
                k - j_star,
                d
            )));
        }
        let sign = Self::a_sign(d);
        if a.iter().any(|&v| v * sign < 0.0) || b.iter().any(|&v| v < 0.0) {
            return Err(Error::param("sign constraints violated"));
        }
        Ok(Self {
            d,
            j_star,
            a,
            b,
            c,
            knots,
        })
    }

    /// `(-1)^(d+1)`.
    pub fn a_sign(d: usize) -> f64 {
        if d.is_multiple_of(2) {
            -1.0
        } else {
            1.0
        }
    }

    pub fn evaluate(&self) -> Vec<f64> {
        let kn = self.knots.as_slice();
        let n = self.knots.n();
        let nf = n as f64;
        (1..=n)
            .map(|t| {
                let mut v = 0.0;
                for (j, &aj) in self.a.iter().enumerate() {
                    v += aj * left_power(kn[j + 1], t, self.d, nf);
                }
                for (j, &bj) in self.b.iter().enumerate() {
                    v += bj * right_power(kn[self.j_star + j], t, self.d, nf);
                }
                let u = t as f64 / nf;
                for (l, &cl) in self.c.iter().enumerate() {
                    v += cl / factorial(l) * u.powi(l as i32);
                }
                v
            })
            .collect()
    }

    /// Same function in the per-piece shifted parametrization.
    pub fn to_piecewise(&self) -> PiecewiseSpline {
        let d = self.d;
        let kn = self.knots.as_slice();
        let nf = self.knots.n() as f64;
        let mut coeffs = Vec::with_capacity(self.knots.pieces());
        // (x - t)^d as coefficients centred at t.
        let pure = |scale: f64| {
            let mut v = vec![0.0; d + 1];
            v[d] = scale;
            v
        };
        let mut poly = vec![0.0; d + 1];
        for (l, &cl) in self.c.iter().enumerate() {
            poly[l] = cl / factorial(l);
        }
        for p in 0..self.knots.pieces() {
            let s = kn[p] as f64 / nf;
            let mut acc = shift_polynomial(&poly, 0.0, s);
            let sign_d = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
            for j in (p + 1)..=self.j_star {
                let term = shift_polynomial(&pure(sign_d * self.a[j - 1]), kn[j] as f64 / nf, s);
                acc.iter_mut().zip(term).for_each(|(x, y)| *x += y);
            }
            for j in self.j_star..=p.min(self.knots.pieces() - 1) {
                let term = shift_polynomial(&pure(self.b[j - self.j_star]), kn[j] as f64 / nf, s);
                acc.iter_mut().zip(term).for_each(|(x, y)| *x += y);
            }
            coeffs.push(acc);
        }
        PiecewiseSpline::new(self.knots.clone(), coeffs).expect("knots are distinct")
    }
}

/// `(d+1)`-th differences of `theta` are all `>= -tol`.
pub fn is_d_monotone(theta: &[f64], d: usize, tol: f64) -> bool {
    let order = d + 1;
    if theta.len() <= order {
        return true;
    }
    (0..theta.len() - order).all(|i| {
        let diff: f64 = (0..=order)
            .map(|r| {
                let sign = if (order - r).is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * binomial(order, r) * theta[i + r]
            })
            .sum();
        diff >= -tol
    })
}

/// Random valid canonical representation with `k` pieces on `n` points.
pub fn random_canonical<R: Rng>(rng: &mut R, d: usize, k: usize, n: usize) -> Result<MonotoneCanonical> {
    let p = d + 1;
    if n < k * p {
        return Err(Error::param(format!("{k} pieces of {p} points exceed n = {n}")));
    }
    // Spread the slack over the k pieces at random.
    let slack = n - k * p;
    let mut cuts: Vec<usize> = (0..k - 1).map(|_| rng.random_range(0..=slack)).collect();
    cuts.sort_unstable();
    let mut knots = vec![0];
    for (j, &c) in cuts.iter().enumerate() {
        knots.push((j + 1) * p + c);
    }
    knots.push(n);
    let kv = validate_knots(&knots, d, n)?;
    let j_star = rng.random_range(0..=k);
    let sign = MonotoneCanonical::a_sign(d);
    let draw = |rng: &mut R| -> f64 {
        // Mix exact zeros with heavy and light magnitudes.
        match rng.random_range(0..4) {
            0 => 0.0,
            1 => rng.random_range(0.0..0.1),
            _ => rng.random_range(0.0..5.0),
        }
    };
    let a = (0..j_star).map(|_| sign * draw(rng)).collect();
    let b = (0..k - j_star).map(|_| draw(rng)).collect();
    let c = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
    MonotoneCanonical::new(d, j_star, a, b, c, kv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn polynomial_when_jumps_vanish() {
        let kv = validate_knots(&[0, 4, 9], 2, 9).unwrap();
        let rep = MonotoneCanonical::new(2, 1, vec![0.0], vec![0.0], vec![1.0, -2.0], kv).unwrap();
        let theta = rep.evaluate();
        for (i, v) in theta.iter().enumerate() {
            let u = (i + 1) as f64 / 9.0;
            assert!((v - (1.0 - 2.0 * u)).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_degree_step() {
        let kv = validate_knots(&[0, 3, 7], 0, 7).unwrap();
        let rep = MonotoneCanonical::new(0, 1, vec![0.0], vec![1.0], vec![], kv).unwrap();
        assert_eq!(rep.evaluate(), vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn sign_constraints_enforced() {
        let kv = validate_knots(&[0, 3, 7], 1, 7).unwrap();
        assert!(MonotoneCanonical::new(1, 1, vec![-1.0], vec![1.0], vec![0.0], kv.clone()).is_err());
        assert!(MonotoneCanonical::new(1, 1, vec![1.0], vec![-1.0], vec![0.0], kv).is_err());
    }

    #[test]
    fn random_members_are_monotone_and_piecewise_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let d = rng.random_range(0..4usize);
            let k = rng.random_range(1..5usize);
            let n = rng.random_range(k * (d + 1)..60.max(k * (d + 1) + 1));
            let rep = random_canonical(&mut rng, d, k, n).unwrap();
            let theta = rep.evaluate();
            let scale = theta.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            assert!(is_d_monotone(&theta, d, 1e-10 * scale));
            let again = rep.to_piecewise().evaluate();
            for (x, y) in theta.iter().zip(&again) {
                assert!((x - y).abs() < 1e-10 * scale);
            }
        }
    }
}

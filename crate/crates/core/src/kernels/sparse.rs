use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::positive_power;
use crate::model::{check_membership, validate_knots, KnotVector, ModelParams, DEFAULT_MEMBERSHIP_TOL};

/// Homogeneous system for a spline that vanishes outside `[1/3, 2/3]`.
///
/// The middle third is cut into `k - 2` equal pieces at `tau_1 < ... <
/// tau_{k-1}`; the spline is `sum_j sum_l c^j_l (x - tau_j)_+^l` for
/// `l` in `d0+1..=d`, which vanishes left of `1/3` automatically. Vanishing
/// right of `2/3` requires derivatives `0..=d0` to be zero at `tau_{k-1}`:
/// one row per derivative order.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub d: usize,
    pub d0: i32,
    pub k: usize,
    /// `tau_0 = 0, ..., tau_k = 1`.
    pub tau: Vec<BigRational>,
    pub matrix: Vec<Vec<BigRational>>,
    pub nullspace: Vec<Vec<BigRational>>,
    pub signal: Option<SparseSignal>,
}

#[derive(Debug, Clone)]
pub struct SparseSignal {
    pub n: usize,
    pub knots: KnotVector,
    /// `c^j_l`, ordered by `j` then `l`.
    pub coefficients: Vec<f64>,
    pub theta: Vec<f64>,
    /// Every middle coefficient is nonzero.
    pub general_position: bool,
    pub member: bool,
}

impl SparseSystem {
    pub fn nullspace_dim(&self) -> usize {
        self.nullspace.len()
    }

    pub fn columns(&self) -> usize {
        self.k.saturating_sub(2) * (self.d as i32 - self.d0) as usize
    }

    pub fn to_json(&self) -> serde_json::Value {
        let strs = |v: &[BigRational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        json!({
            "d": self.d,
            "d0": self.d0,
            "k": self.k,
            "tau": strs(&self.tau),
            "matrix": self.matrix.iter().map(|r| strs(r)).collect::<Vec<_>>(),
            "nullspace_dim": self.nullspace_dim(),
            "nullspace": self.nullspace.iter().map(|r| strs(r)).collect::<Vec<_>>(),
            "signal": self.signal.as_ref().map(|s| json!({
                "n": s.n,
                "knots": s.knots.as_slice(),
                "coefficients": s.coefficients,
                "general_position": s.general_position,
                "member": s.member,
                "theta": s.theta,
            })),
        })
    }
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `l (l-1) ... (l-r+1)`, zero when `r > l`.
fn falling_int(l: usize, r: usize) -> BigRational {
    if r > l {
        return BigRational::zero();
    }
    let v: i64 = (0..r).map(|i| (l - i) as i64).product();
    BigRational::from_integer(BigInt::from(v))
}

/// Basis of the right nullspace by exact Gauss-Jordan elimination.
pub fn rational_nullspace(a: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = BigRational::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let sub = &f * &m[r][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

/// Builds the system for `k` pieces. Without `n` the grid is
/// `3 (k-2) * 4 (d+1)` points so that every `tau_j` is a design point;
/// otherwise the knots are rounded down to the grid and the system is
/// rebuilt from the rounded positions.
pub fn sparse_construct(d: usize, d0: i32, k: usize, n: Option<usize>) -> Result<SparseSystem> {
    ModelParams::new(d, d0, k.max(1), d + 1, 0.0)?;
    if k < 2 {
        return Err(Error::param("the construction needs k >= 2"));
    }
    let middle = k - 2;
    let p = d + 1;
    let n = n.unwrap_or(3 * middle.max(1) * 4 * p);
    let mut tau = vec![BigRational::zero()];
    for j in 1..k {
        let t = if middle == 0 {
            rat(1, 3)
        } else {
            rat(1, 3) + rat((j - 1) as i64, (3 * middle) as i64)
        };
        // Round down onto the design grid.
        let grid = (&t * BigRational::from_integer(BigInt::from(n))).floor();
        tau.push(grid / BigRational::from_integer(BigInt::from(n)));
    }
    tau.push(BigRational::one());

    let jump = (d as i32 - d0) as usize;
    let first = (d0 + 1) as usize;
    let cols = middle * jump;
    let last = tau[k - 1].clone();
    let matrix: Vec<Vec<BigRational>> = (0..first)
        .map(|r| {
            let mut row = Vec::with_capacity(cols);
            for tj in &tau[1..=middle] {
                let h = &last - tj;
                for l in first..=d {
                    let mut pw = BigRational::one();
                    for _ in 0..l.saturating_sub(r) {
                        pw = &pw * &h;
                    }
                    row.push(falling_int(l, r) * pw);
                }
            }
            row
        })
        .collect();
    let nullspace = if cols == 0 {
        Vec::new()
    } else {
        rational_nullspace(&matrix, cols)
    };

    let mut system = SparseSystem {
        d,
        d0,
        k,
        tau,
        matrix,
        nullspace,
        signal: None,
    };
    if system.nullspace_dim() > 0 {
        system.signal = Some(materialize(&system, n)?);
    }
    Ok(system)
}

fn materialize(sys: &SparseSystem, n: usize) -> Result<SparseSignal> {
    let d = sys.d;
    let cols = sys.columns();
    let knots_int: Vec<usize> = sys
        .tau
        .iter()
        .map(|t| (t * BigRational::from_integer(BigInt::from(n))).to_integer().to_usize().unwrap_or(0))
        .collect();
    let knots = validate_knots(&knots_int, d, n)?;

    // Look for a combination of the basis with no zero coefficient.
    let combine = |weights: &[i64]| -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); cols];
        for (b, &w) in sys.nullspace.iter().zip(weights) {
            for (x, y) in v.iter_mut().zip(b) {
                *x = &*x + y * BigRational::from_integer(BigInt::from(w));
            }
        }
        v
    };
    let dim = sys.nullspace_dim();
    let mut chosen = None;
    for attempt in 1..=32i64 {
        let w: Vec<i64> = (0..dim as i64).map(|i| 1 + i * attempt).collect();
        let v = combine(&w);
        if v.iter().all(|x| !x.is_zero()) {
            chosen = Some(v);
            break;
        }
    }
    let general_position = chosen.is_some();
    let coeffs = chosen.unwrap_or_else(|| combine(&vec![1; dim]));
    let largest = coeffs.iter().map(|c| c.abs()).max().unwrap_or_else(BigRational::one);
    let mut coefficients: Vec<f64> = coeffs
        .iter()
        .map(|c| (c / &largest).to_f64().unwrap_or(f64::NAN))
        .collect();

    let nf = n as f64;
    let tau: Vec<f64> = sys.tau.iter().map(|t| t.to_f64().unwrap_or(f64::NAN)).collect();
    let end = knots_int[sys.k - 1];
    let first = (sys.d0 + 1) as usize;
    let jump = d + 1 - first;
    let mut theta: Vec<f64> = (1..=n)
        .map(|t| {
            if t > end {
                return 0.0;
            }
            let x = t as f64 / nf;
            let mut v = 0.0;
            for j in 0..sys.k - 2 {
                for (li, l) in (first..=d).enumerate() {
                    v += coefficients[j * jump + li] * positive_power(x - tau[j + 1], l);
                }
            }
            v
        })
        .collect();
    let peak = theta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        theta.iter_mut().for_each(|v| *v /= peak);
        coefficients.iter_mut().for_each(|v| *v /= peak);
    }
    let params = ModelParams::new(d, sys.d0, sys.k, n, 0.0)?;
    let member = check_membership(&theta, &params, DEFAULT_MEMBERSHIP_TOL)?.member;
    Ok(SparseSignal {
        n,
        knots,
        coefficients,
        theta,
        general_position,
        member,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boxcar() {
        let s = sparse_construct(0, -1, 3, None).unwrap();
        assert_eq!(s.nullspace_dim(), 1);
        let sig = s.signal.unwrap();
        assert!(sig.member && sig.general_position);
        let n = sig.n;
        for (i, v) in sig.theta.iter().enumerate() {
            let t = i + 1;
            let inside = 3 * t > n && 3 * t <= 2 * n;
            assert_eq!(v.abs(), if inside { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn hat() {
        let s = sparse_construct(1, 0, 4, None).unwrap();
        assert_eq!(s.matrix.len(), 1);
        assert_eq!(s.matrix[0], vec![rat(1, 3), rat(1, 6)]);
        assert_eq!(s.nullspace_dim(), 1);
        let v = &s.nullspace[0];
        assert_eq!(&v[0] / &v[1], rat(-1, 2));
        let sig = s.signal.unwrap();
        assert!(sig.member);
        let peak = sig.theta.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap().0;
        assert_eq!(peak + 1, sig.n / 2);
    }

    #[test]
    fn three_linear_pieces_only_vanish_trivially() {
        let s = sparse_construct(1, 0, 3, None).unwrap();
        assert_eq!(s.nullspace_dim(), 0);
        assert!(s.signal.is_none());
    }

    #[test]
    fn rounded_grid_still_works() {
        let s = sparse_construct(1, 0, 4, Some(50)).unwrap();
        assert_eq!(s.nullspace_dim(), 1);
        assert!(s.signal.unwrap().member);
    }

    #[test]
    fn too_coarse_grid_is_rejected() {
        assert!(sparse_construct(2, 1, 5, Some(12)).is_err());
    }
}

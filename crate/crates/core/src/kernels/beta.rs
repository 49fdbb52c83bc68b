use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::Calibration;
use crate::error::{Error, Result};
use crate::linalg::{binomial, falling, rising};
use crate::model::{transition_boundary, validate_knots, KnotVector};

/// Coefficients of the cancellation scheme across the last knots of a
/// `k0`-piece configuration.
#[derive(Debug, Clone)]
pub struct BetaTable {
    pub d: usize,
    pub d0: i32,
    pub knots: KnotVector,
    /// `beta[s][j]`, dense in `j` up to `s_max * (d - d0)` with zeros beyond
    /// `s * (d - d0)`.
    pub beta: Vec<Vec<f64>>,
    /// `dfactor[i][j]` for `i` in `1..=d+1`; zero where `j > d + 1 - i`.
    pub dfactor: Vec<Vec<f64>>,
}

impl BetaTable {
    pub fn jump(&self) -> usize {
        (self.d as i32 - self.d0) as usize
    }

    pub fn s_max(&self) -> usize {
        (self.d0 + 1) as usize / self.jump()
    }

    pub fn k0(&self) -> usize {
        self.knots.pieces()
    }

    /// `beta^s_{i,j} = D(i,j) beta^s_j`.
    pub fn combined(&self, s: usize, i: usize, j: usize) -> f64 {
        self.dfactor[i][j] * self.beta[s][j]
    }

    /// `n_{k0-l; k0-1-s}`.
    fn span(&self, l: usize, s: usize) -> f64 {
        let k0 = self.k0();
        self.knots.scaled_gap(k0 - l, k0 - 1 - s)
    }
}

pub fn beta_table(d: usize, d0: i32, knots: &KnotVector) -> Result<BetaTable> {
    let k0 = transition_boundary(d, d0)?;
    if knots.pieces() != k0 {
        return Err(Error::param(format!(
            "beta table needs {k0} pieces, got {}",
            knots.pieces()
        )));
    }
    let m = (d as i32 - d0) as usize;
    let s_max = (d0 + 1) as usize / m;
    let width = s_max * m + 1;
    let mut beta = vec![vec![0.0; width]; s_max + 1];
    beta[0][0] = 1.0;
    for s in 1..=s_max {
        let g = knots.scaled_gap(k0 - s, k0 - 1 - s);
        beta[s][0] = 1.0;
        for j in 1..=s * m {
            let mut acc = 0.0;
            for l in 0..=j.min((s - 1) * m) {
                acc += binomial(s * m - l, j - l) * g.powi((j - l) as i32) * beta[s - 1][l];
            }
            beta[s][j] = acc;
        }
    }
    let mut dfactor = vec![vec![0.0; d + 1]; d + 2];
    for (i, row) in dfactor.iter_mut().enumerate().skip(1) {
        for (j, slot) in row.iter_mut().enumerate() {
            if j <= d + 1 - i {
                *slot = rising(i, j) / falling(d + 1 - i, j);
            }
        }
    }
    Ok(BetaTable {
        d,
        d0,
        knots: knots.clone(),
        beta,
        dfactor,
    })
}

/// Returns `(beta^s_{i,j2} / beta^s_{i,j1}, bound)` where `bound` is the
/// product of gap powers that the ratio dominates up to a constant.
pub fn beta_ratio_check(table: &BetaTable, s: usize, i: usize, j1: usize, j2: usize) -> Result<(f64, f64)> {
    let m = table.jump();
    if s > table.s_max() {
        return Err(Error::param(format!("s = {s} exceeds {}", table.s_max())));
    }
    let i_max = (table.d + 1).saturating_sub(s * m);
    if i == 0 || i > i_max {
        return Err(Error::param(format!("i = {i} outside [1, {i_max}]")));
    }
    if j1 > j2 || j2 > s * m {
        return Err(Error::param(format!("need 0 <= j1 <= j2 <= {}", s * m)));
    }
    let den = table.combined(s, i, j1);
    if den == 0.0 {
        return Err(Error::Degenerate(format!("beta^{s}_({i},{j1}) vanishes")));
    }
    let lhs = table.combined(s, i, j2) / den;
    if j1 == j2 {
        return Ok((lhs, 1.0));
    }
    let g = |l: usize| table.span(l, s);
    let num: f64 = (1..=s).map(|l| g(l).powi(m as i32)).product();
    let q1 = j1 / m;
    let lower: f64 = (1..=q1).map(|l| g(l).powi(m as i32)).product::<f64>() * g(1 + q1).powi((j1 % m) as i32);
    let c2 = j2.div_ceil(m);
    let upper: f64 = (c2 + 1..=s).map(|l| g(l).powi(m as i32)).product::<f64>()
        * g(c2).powi(((m - j2 % m) % m) as i32);
    Ok((lhs, num / (lower * upper)))
}

/// Random valid knots with `pieces` pieces; gaps span several orders of
/// magnitude so that extreme configurations are sampled.
pub fn random_knots<R: Rng>(rng: &mut R, d: usize, pieces: usize) -> Result<KnotVector> {
    let mut knots = vec![0usize];
    for _ in 0..pieces {
        let exp = rng.random_range(0.0..3.0f64);
        let gap = (d + 1) + (10f64.powf(exp) as usize);
        knots.push(knots.last().unwrap() + gap);
    }
    let n = *knots.last().unwrap();
    Ok(validate_knots(&knots, d, n)?)
}

/// Every `(s, i, j1, j2)` admissible for a table.
fn index_grid(table: &BetaTable) -> Vec<(usize, usize, usize, usize)> {
    let m = table.jump();
    let mut out = Vec::new();
    for s in 1..=table.s_max() {
        for i in 1..=(table.d + 1 - s * m) {
            for j2 in 0..=s * m {
                for j1 in 0..=j2 {
                    out.push((s, i, j1, j2));
                }
            }
        }
    }
    out
}

/// Smallest `lhs / bound` over a set of knot vectors.
pub fn min_beta_ratio(tables: &[BetaTable]) -> Result<f64> {
    let mut min = f64::INFINITY;
    for t in tables {
        for (s, i, j1, j2) in index_grid(t) {
            let (lhs, rhs) = beta_ratio_check(t, s, i, j1, j2)?;
            min = min.min(lhs / rhs);
        }
    }
    Ok(min)
}

/// Calibrates the constant on a deterministic extreme-gap grid plus
/// `random` seeded configurations, for every `d <= d_max` and every `d0`
/// with at least one cancellation step. The constant is `margin` times the
/// smallest ratio seen.
pub fn calibrate_beta_ratio(d_max: usize, random: usize, seed: u64, margin: f64) -> Result<Calibration> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut tables = Vec::new();
    for (d, d0) in cancelling_pairs(d_max) {
        let k0 = transition_boundary(d, d0)?;
        // Each gap takes a small, medium or large value.
        let levels = [d + 1, 10 * (d + 1), 1000 * (d + 1)];
        let combos = 3usize.pow(k0 as u32);
        for code in 0..combos {
            let mut knots = vec![0usize];
            let mut c = code;
            for _ in 0..k0 {
                knots.push(knots.last().unwrap() + levels[c % 3]);
                c /= 3;
            }
            let n = *knots.last().unwrap();
            tables.push(beta_table(d, d0, &validate_knots(&knots, d, n)?)?);
        }
        for _ in 0..random {
            tables.push(beta_table(d, d0, &random_knots(&mut rng, d, k0)?)?);
        }
    }
    let observed = min_beta_ratio(&tables)?;
    Ok(Calibration {
        name: "beta_ratio".into(),
        constant: margin * observed,
        observed,
        margin,
        seed,
        instances: tables.len(),
        grid: format!("d <= {d_max}, gaps in {{d+1, 10(d+1), 1000(d+1)}}^k0 plus {random} random per (d, d0)"),
    })
}

/// `(d, d0)` pairs with `d <= d_max` admitting `s >= 1`.
pub fn cancelling_pairs(d_max: usize) -> Vec<(usize, i32)> {
    let mut out = Vec::new();
    for d in 1..=d_max {
        for d0 in 0..d as i32 {
            let m = d as i32 - d0;
            if (d0 + 1) / m >= 1 {
                out.push((d, d0));
            }
        }
    }
    out
}

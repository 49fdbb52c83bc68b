use std::str::FromStr;

use rand::Rng;

use super::loglog_rate;
use crate::error::{Error, Result};
use crate::linalg::positive_power;

/// Truth used by a Monte Carlo cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalKind {
    Zero,
    /// Single truncated power at level `ceil(M/2)` of the lower-bound family.
    LfSpline,
    /// Constant bump on the middle third with squared norm `c^2 loglog(16n)`.
    SparseBoxcar,
    /// Convex ensemble member with an index vector drawn per replicate.
    ShapedLf,
    /// Signal read from a file; its length fixes the only admissible `n`.
    CustomFile,
}

impl SignalKind {
    pub fn name(self) -> &'static str {
        match self {
            SignalKind::Zero => "zero",
            SignalKind::LfSpline => "lf_spline",
            SignalKind::SparseBoxcar => "sparse_boxcar",
            SignalKind::ShapedLf => "shaped_lf",
            SignalKind::CustomFile => "custom_file",
        }
    }
}

impl FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "zero" => SignalKind::Zero,
            "lf_spline" => SignalKind::LfSpline,
            "sparse_boxcar" => SignalKind::SparseBoxcar,
            "shaped_lf" => SignalKind::ShapedLf,
            "custom_file" => SignalKind::CustomFile,
            other => return Err(Error::param(format!("unknown signal kind '{other}'"))),
        })
    }
}

/// `M = floor(log2(n / (d+1)))`, the number of levels in the family.
pub fn lf_levels(n: usize, d: usize) -> usize {
    let r = n / (d + 1);
    if r == 0 {
        0
    } else {
        r.ilog2() as usize
    }
}

/// `theta_i = alpha (i/n - tau/n)_+^d` with `tau = floor((1 - 2^-ell) n)` and
/// `alpha = c (2^ell)^((2d+1)/2) sqrt(loglog(16n)/n)`.
pub fn least_favorable_signal(n: usize, d: usize, ell: usize, c_scale: f64) -> Result<Vec<f64>> {
    let m = lf_levels(n, d);
    if ell == 0 || ell > m {
        return Err(Error::param(format!("level {ell} outside [1, {m}]")));
    }
    let nf = n as f64;
    let tau = (nf * (1.0 - 0.5f64.powi(ell as i32))).floor();
    let alpha = c_scale * 2f64.powf(ell as f64 * (2 * d + 1) as f64 / 2.0) * (loglog_rate(n, 1) / nf).sqrt();
    Ok((1..=n)
        .map(|i| alpha * positive_power((i as f64 - tau) / nf, d))
        .collect())
}

/// Block label in the convex ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfIndex {
    Reference,
    Level(usize),
}

/// `l0 = floor(log2(n / (2 k/3)))`.
pub fn shaped_lf_levels(n: usize, k: usize) -> usize {
    let kt = k / 3;
    let r = if kt == 0 { 0 } else { n / (2 * kt) };
    if r == 0 {
        0
    } else {
        r.ilog2() as usize
    }
}

/// Convex piecewise-linear ensemble member on `k/3` equal segments.
///
/// Segment `j` carries the hinge `alpha_l (x - tau_l)_+` for its label
/// `l`, which hands over to the steeper reference hinge where the two lines
/// cross; every earlier segment keeps contributing its reference hinge, so
/// the sum is continuous and convex. Hinge locations are rounded down to the
/// design grid (the crossing is rounded to the nearest point and kept two
/// points away from its neighbours) so that the sequence is exactly a
/// convex spline with integer knots and at most `k` pieces.
pub fn shaped_lf_ensemble(n: usize, k: usize, index: &[LfIndex], c_scale: f64) -> Result<Vec<f64>> {
    if k < 3 || !k.is_multiple_of(3) {
        return Err(Error::param(format!("k = {k} must be a positive multiple of 3")));
    }
    let kt = k / 3;
    let l0 = shaped_lf_levels(n, k);
    if l0 == 0 {
        return Err(Error::param(format!("n = {n} too small for {kt} segments")));
    }
    if index.len() != kt {
        return Err(Error::param(format!("index vector has {} entries, need {kt}", index.len())));
    }
    for (j, ix) in index.iter().enumerate() {
        if let LfIndex::Level(l) = *ix {
            if l == 0 || l > l0 {
                return Err(Error::param(format!("entry {} = {l} outside [1, {l0}]", j + 1)));
            }
        }
    }
    let nf = n as f64;
    let amp = c_scale * (loglog_rate(n, k) / nf).sqrt();
    let slope = |l: usize| amp * 2f64.powf(1.5 * (l as f64 - 1.0));
    let offset = |l: usize| (1.0 - 0.5f64.powi(l as i32 - 1)) / kt as f64;
    let start = |j: usize| (j * n) / kt;

    // (grid location, slope increment)
    let mut hinges: Vec<(usize, f64)> = Vec::new();
    for (j, ix) in index.iter().enumerate() {
        let s = start(j) as f64;
        let h_ref = (s + offset(l0 + 1) * nf).floor() as usize;
        let a_ref = slope(l0 + 1);
        match *ix {
            LfIndex::Reference => hinges.push((h_ref, a_ref)),
            LfIndex::Level(l) => {
                let a = slope(l);
                let h = (s + offset(l) * nf).floor() as usize;
                let cross = (a_ref * h_ref as f64 - a * h as f64) / (a_ref - a);
                let hi = start(j + 1).saturating_sub(2);
                let c = (cross.round() as usize).clamp(h + 2, hi.max(h + 2));
                hinges.push((h, a));
                hinges.push((c, a_ref - a));
            }
        }
    }
    Ok((1..=n)
        .map(|i| {
            hinges
                .iter()
                .map(|&(h, a)| a * positive_power((i as f64 - h as f64) / nf, 1))
                .sum()
        })
        .collect())
}

/// Uniformly drawn index vector, one label per segment.
pub fn random_lf_index<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<LfIndex> {
    let l0 = shaped_lf_levels(n, k).max(1);
    (0..k / 3).map(|_| LfIndex::Level(rng.random_range(1..=l0))).collect()
}

/// `h 1{n/3 < i <= 2n/3}` with `h` chosen so that the squared norm is
/// `c^2 loglog(16n)`.
pub fn sparse_boxcar(n: usize, c_scale: f64) -> Result<Vec<f64>> {
    let lo = n / 3;
    let hi = 2 * n / 3;
    if hi <= lo {
        return Err(Error::param(format!("n = {n} too small for a middle third")));
    }
    let h = c_scale * (loglog_rate(n, 1) / (hi - lo) as f64).sqrt();
    Ok((1..=n).map(|i| if i > lo && i <= hi { h } else { 0.0 }).collect())
}

/// Truth for one replicate of a cell. Generated signals are in units of
/// `sigma`; custom signals are used as given.
#[allow(clippy::too_many_arguments)]
pub fn build_signal<R: Rng>(
    kind: SignalKind,
    n: usize,
    d: usize,
    k: usize,
    sigma: f64,
    c_scale: f64,
    custom: Option<&[f64]>,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let unit = match kind {
        SignalKind::Zero => return Ok(vec![0.0; n]),
        SignalKind::CustomFile => {
            let v = custom.ok_or_else(|| Error::param("custom signal requires an input file"))?;
            if v.len() != n {
                return Err(Error::param(format!("custom signal has length {}, grid asks for n = {n}", v.len())));
            }
            return Ok(v.to_vec());
        }
        SignalKind::LfSpline => {
            let m = lf_levels(n, d);
            least_favorable_signal(n, d, m.div_ceil(2).max(1), c_scale)?
        }
        SignalKind::SparseBoxcar => sparse_boxcar(n, c_scale)?,
        SignalKind::ShapedLf => {
            let index = random_lf_index(rng, n, k);
            shaped_lf_ensemble(n, k, &index, c_scale)?
        }
    };
    Ok(unit.into_iter().map(|v| v * sigma).collect())
}

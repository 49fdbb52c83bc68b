//! Self-checks of the exact and numerical kernels, grouped into suites.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::kernels::{
    beta_ratio_check, beta_table, binomial_identity_check, calibrate_beta_ratio, calibrate_quad_forms,
    cancelling_pairs, dof_min_pieces, min_beta_ratio, moment_matrix_lambda_min, quad_form_residuals,
    random_end_long_spline, random_knots, seq2func_constant, sparse_construct,
};
use crate::model::transition_boundary;
use crate::shape::{calibrate_coef_bound, coef_bound_statistic, random_unit_member};

pub const SUITES: [&str; 8] = [
    "binomial", "moment", "beta", "quadform", "dof", "sparse", "seq2func", "coefbound",
];

/// Margins applied to calibrated constants: lower bounds are shrunk, upper
/// bounds inflated.
pub const LOWER_MARGIN: f64 = 0.9;
pub const UPPER_MARGIN: f64 = 1.1;

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub instances: usize,
    /// Smallest observed margin, scaled so that values `>= 1` pass.
    pub min_ratio: Option<f64>,
    /// Largest deviation from an exact identity.
    pub max_residual: Option<f64>,
    pub pass: bool,
    pub details: serde_json::Value,
}

fn report(
    suite: &str,
    instances: usize,
    min_ratio: Option<f64>,
    max_residual: Option<f64>,
    pass: bool,
    details: serde_json::Value,
) -> CheckReport {
    CheckReport {
        suite: suite.to_string(),
        instances,
        min_ratio,
        max_residual,
        pass,
        details,
    }
}

/// Runs one suite, or every suite for `"all"`. Calibrations use `seed`;
/// validation draws use `seed + 1`.
pub fn run_checks(suite: &str, seed: u64) -> Result<CheckReport> {
    match suite {
        "binomial" => binomial_suite(),
        "moment" => moment_suite(),
        "beta" => beta_suite(seed),
        "quadform" => quad_suite(seed),
        "dof" => dof_suite(),
        "sparse" => sparse_suite(),
        "seq2func" => seq2func_suite(),
        "coefbound" => coef_suite(seed),
        "all" => {
            let parts = SUITES.iter().map(|s| run_checks(s, seed)).collect::<Result<Vec<_>>>()?;
            let min_ratio = parts.iter().filter_map(|p| p.min_ratio).reduce(f64::min);
            let max_residual = parts.iter().filter_map(|p| p.max_residual).reduce(f64::max);
            Ok(report(
                "all",
                parts.iter().map(|p| p.instances).sum(),
                min_ratio,
                max_residual,
                parts.iter().all(|p| p.pass),
                serde_json::to_value(&parts)?,
            ))
        }
        other => Err(Error::param(format!(
            "unknown suite '{other}' (expected one of {} or all)",
            SUITES.join(", ")
        ))),
    }
}

/// Alternating binomial sums of every monomial `j^r`, `r < n`, for `n <= 15`.
pub fn binomial_suite() -> Result<CheckReport> {
    let mut count = 0;
    let mut worst = BigInt::zero();
    for n in 1..=15usize {
        for r in 0..n {
            let mut coeffs = vec![BigInt::zero(); r + 1];
            coeffs[r] = BigInt::from(1);
            let v = binomial_identity_check(n, &coeffs)?;
            if v.magnitude() > worst.magnitude() {
                worst = v;
            }
            count += 1;
        }
    }
    let residual = worst.to_f64().unwrap_or(f64::INFINITY).abs();
    Ok(report("binomial", count, None, Some(residual), worst.is_zero(), json!({ "n_max": 15 })))
}

/// Smallest eigenvalue of the moment matrix for `d <= 4`, `m in [d+1, 500]`.
pub fn moment_suite() -> Result<CheckReport> {
    const FLOOR: f64 = 1e-8;
    let mut count = 0;
    let mut min = f64::INFINITY;
    let mut per_degree = Vec::new();
    for d in 0..=4usize {
        let mut dmin = f64::INFINITY;
        for m in d + 1..=500 {
            dmin = dmin.min(moment_matrix_lambda_min(m, d)?);
            count += 1;
        }
        per_degree.push(json!({ "d": d, "lambda_min": dmin }));
        min = min.min(dmin);
    }
    Ok(report(
        "moment",
        count,
        Some(min / FLOOR),
        None,
        min > FLOOR,
        json!({ "floor": FLOOR, "per_degree": per_degree }),
    ))
}

/// Calibrates the beta-ratio constant, validates it on 200 fresh random
/// knot vectors (`d <= 3`), and checks the first cancellation step against
/// powers of the last inner gap when `d0 = d - 1`.
pub fn beta_suite(seed: u64) -> Result<CheckReport> {
    const D_MAX: usize = 3;
    const FRESH: usize = 200;
    let cal = calibrate_beta_ratio(D_MAX, 50, seed, LOWER_MARGIN)?;
    let pairs = cancelling_pairs(D_MAX);
    let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(1));
    let mut tables = Vec::with_capacity(FRESH);
    for i in 0..FRESH {
        let (d, d0) = pairs[i % pairs.len()];
        let k0 = transition_boundary(d, d0)?;
        tables.push(beta_table(d, d0, &random_knots(&mut rng, d, k0)?)?);
    }
    let observed = min_beta_ratio(&tables)?;
    let mut residual: f64 = 0.0;
    for t in tables.iter().filter(|t| t.d0 == t.d as i32 - 1) {
        let gap = t.knots.scaled_gap(t.d + 1, t.d);
        for j in 0..=1 {
            let want = gap.powi(j as i32);
            residual = residual.max((t.beta[1][j] - want).abs() / want.max(1.0));
        }
        let (lhs, rhs) = beta_ratio_check(t, 1, 1, 0, 0)?;
        residual = residual.max((lhs - rhs).abs());
    }
    let ratio = observed / cal.constant;
    Ok(report(
        "beta",
        FRESH,
        Some(ratio),
        Some(residual),
        ratio >= 1.0 && residual <= 1e-12,
        json!({ "calibration": cal, "fresh_min_ratio": observed }),
    ))
}

/// Calibrates the quadratic-form bound and validates it on fresh splines.
pub fn quad_suite(seed: u64) -> Result<CheckReport> {
    const D_MAX: usize = 3;
    const FRESH: usize = 100;
    let cal = calibrate_quad_forms(D_MAX, 200, seed, UPPER_MARGIN)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(1));
    let mut worst: f64 = 0.0;
    for d in 1..=D_MAX {
        let d0 = d as i32 - 1;
        for _ in 0..FRESH {
            let spline = random_end_long_spline(&mut rng, d, d0)?;
            for s in 0..=(d0 + 1) as usize {
                worst = worst.max(quad_form_residuals(&spline, d0, s)?);
            }
        }
    }
    let ratio = cal.constant / worst;
    Ok(report(
        "quadform",
        FRESH * D_MAX,
        Some(ratio),
        None,
        ratio >= 1.0,
        json!({ "calibration": cal, "fresh_max": worst }),
    ))
}

fn dof_rows() -> Result<(Vec<serde_json::Value>, bool)> {
    let mut rows = Vec::new();
    let mut ok = true;
    for d in 0..=4usize {
        for d0 in -1..d as i32 {
            let (k_min, boundary) = dof_min_pieces(d, d0)?;
            let at = sparse_construct(d, d0, k_min, None)?.nullspace_dim();
            let below = if k_min > 2 {
                sparse_construct(d, d0, k_min - 1, None)?.nullspace_dim()
            } else {
                0
            };
            let row_ok = k_min == boundary && at >= 1 && below == 0;
            ok &= row_ok;
            rows.push(json!({
                "d": d, "d0": d0, "k_min": k_min, "k0_plus_1": boundary,
                "nullspace_at": at, "nullspace_below": below, "pass": row_ok,
            }));
        }
    }
    Ok((rows, ok))
}

/// Minimum piece counts from counting degrees of freedom against the
/// nullspace of the exact boundary-matching system.
pub fn dof_suite() -> Result<CheckReport> {
    let (rows, ok) = dof_rows()?;
    Ok(report("dof", rows.len(), None, None, ok, json!(rows)))
}

/// Materialized sparse signals at `k = k0 + 1` must be members. General
/// position (no zero middle coefficient) is reported but not required: for
/// some `(d, d0)` the nullspace is a single line with a structural zero.
pub fn sparse_suite() -> Result<CheckReport> {
    let mut rows = Vec::new();
    let mut ok = true;
    for d in 0..=4usize {
        for d0 in -1..d as i32 {
            let k = transition_boundary(d, d0)? + 1;
            let sys = sparse_construct(d, d0, k, None)?;
            let (member, general) = sys
                .signal
                .as_ref()
                .map(|s| (s.member, s.general_position))
                .unwrap_or((false, false));
            ok &= member;
            rows.push(json!({
                "d": d, "d0": d0, "k": k, "nullspace_dim": sys.nullspace_dim(),
                "member": member, "general_position": general,
            }));
        }
    }
    Ok(report("sparse", rows.len(), None, None, ok, json!(rows)))
}

/// Per-piece discrete-to-continuous norm constants for `d <= 4`.
pub fn seq2func_suite() -> Result<CheckReport> {
    let cals = (0..=4usize).map(|d| seq2func_constant(d, 200)).collect::<Result<Vec<_>>>()?;
    let min = cals.iter().map(|c| c.constant).fold(f64::INFINITY, f64::min);
    Ok(report(
        "seq2func",
        cals.len(),
        Some(min),
        None,
        min > 0.0 && min.is_finite(),
        serde_json::to_value(&cals)?,
    ))
}

/// Calibrates the coefficient bound and validates it on 500 fresh
/// unit-norm members (`d <= 2`, `n in {64, 256}`).
pub fn coef_suite(seed: u64) -> Result<CheckReport> {
    const DEGREES: [usize; 3] = [0, 1, 2];
    const SIZES: [usize; 2] = [64, 256];
    const MAX_PIECES: usize = 4;
    const FRESH: usize = 500;
    let cal = calibrate_coef_bound(&DEGREES, &SIZES, MAX_PIECES, 100, seed, UPPER_MARGIN)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(1));
    let mut worst: f64 = 0.0;
    for i in 0..FRESH {
        let d = DEGREES[i % DEGREES.len()];
        let n = SIZES[(i / DEGREES.len()) % SIZES.len()];
        let (theta, k) = random_unit_member(&mut rng, d, MAX_PIECES, n)?;
        worst = worst.max(coef_bound_statistic(&theta, d, k)?);
    }
    let ratio = if worst > 0.0 { cal.constant / worst } else { f64::INFINITY };
    Ok(report(
        "coefbound",
        FRESH,
        Some(ratio),
        None,
        worst <= cal.constant,
        json!({ "calibration": cal, "fresh_max": worst }),
    ))
}

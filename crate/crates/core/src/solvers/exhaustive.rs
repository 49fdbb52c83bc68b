use super::{fit_given_knots, tie_slack, FitResult};
use crate::error::{Error, Result};
use crate::model::{validate_knots, KnotVector, ModelParams};

pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Number of knot vectors with between 1 and `k` nonempty pieces, each of
/// at least `d + 1` points, covering `n` points.
pub fn count_configurations(n: usize, d: usize, k: usize) -> u128 {
    let p = d + 1;
    let mut total = 0u128;
    for m in 1..=k {
        if m * p > n {
            break;
        }
        // Compositions of n into m parts of size >= p.
        let top = (n - m * p + m - 1) as u128;
        let mut c = 1u128;
        for i in 0..(m - 1) as u128 {
            c = match c.checked_mul(top - i) {
                Some(v) => v / (i + 1),
                None => return u128::MAX,
            };
        }
        total = total.saturating_add(c);
    }
    total
}

/// Visits every valid configuration with at most `k` nonempty pieces, left
/// padded with zeros to length `k + 1`, in increasing lexicographic order.
pub fn for_each_configuration<F>(n: usize, d: usize, k: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&KnotVector) -> Result<()>,
{
    let p = d + 1;
    for m in 1..=k {
        if m * p > n {
            break;
        }
        let mut inner = Vec::with_capacity(m - 1);
        recurse(n, d, p, k, m, &mut inner, &mut visit)?;
    }
    Ok(())
}

fn recurse<F>(
    n: usize,
    d: usize,
    p: usize,
    k: usize,
    m: usize,
    inner: &mut Vec<usize>,
    visit: &mut F,
) -> Result<()>
where
    F: FnMut(&KnotVector) -> Result<()>,
{
    if inner.len() == m - 1 {
        let mut knots = vec![0; k + 1 - m];
        knots.extend_from_slice(inner);
        knots.push(n);
        let kv = validate_knots(&knots, d, n)?;
        return visit(&kv);
    }
    let last = inner.last().copied().unwrap_or(0);
    let remaining = m - 1 - inner.len();
    // Leave room for `remaining` more pieces after this knot.
    let hi = n - remaining * p;
    for t in last + p..=hi {
        inner.push(t);
        recurse(n, d, p, k, m, inner, visit)?;
        inner.pop();
    }
    Ok(())
}

fn check_budget(n: usize, d: usize, k: usize, budget: u128) -> Result<()> {
    let count = count_configurations(n, d, k);
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    Ok(())
}

/// Best fit over all configurations; ties keep the lexicographically
/// smallest padded knot vector.
pub fn exhaustive_fit(y: &[f64], params: &ModelParams, budget: u128) -> Result<FitResult> {
    let mut path = exhaustive_path(y, params, budget)?;
    Ok(path.pop().expect("path has k entries"))
}

/// Best fits for each budget `1..=params.k` from one enumeration.
pub fn exhaustive_path(y: &[f64], params: &ModelParams, budget: u128) -> Result<Vec<FitResult>> {
    let n = params.n;
    let d = params.d;
    if n < d + 1 {
        return Err(Error::InfeasibleSegment { len: n, degree: d });
    }
    check_budget(n, d, params.k, budget)?;
    let slack = tie_slack(y);
    // Best per exact number of nonempty pieces.
    let mut per_m: Vec<Option<FitResult>> = vec![None; params.k + 1];
    for_each_configuration(n, d, params.k, |kv| {
        let m = kv.nonempty_count();
        let fit = fit_given_knots(y, params, kv)?;
        let slot = &mut per_m[m];
        if slot.as_ref().is_none_or(|b| fit.sse < b.sse - slack) {
            *slot = Some(fit);
        }
        Ok(())
    })?;
    let mut out = Vec::with_capacity(params.k);
    let mut chosen: Option<&FitResult> = None;
    for k in 1..=params.k {
        if let Some(f) = &per_m[k] {
            if chosen.is_none_or(|c| f.sse < c.sse - slack) {
                chosen = Some(f);
            }
        }
        let c = chosen.expect("a single piece is always feasible");
        let knots = c.knots().padded(k).expect("fewer pieces than budget");
        let mut fit = c.clone();
        fit.spline = crate::model::PiecewiseSpline::new(knots.clone(), pad_coeffs(&c.spline.coeffs, k))?;
        fit.k_selected = k;
        out.push(fit);
    }
    Ok(out)
}

/// Drops or adds leading empty pieces so that `k` coefficient vectors remain.
fn pad_coeffs(coeffs: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    let lead = coeffs.iter().take_while(|c| c.is_empty()).count();
    let core = &coeffs[lead..];
    let mut out = vec![Vec::new(); k - core.len()];
    out.extend_from_slice(core);
    out
}

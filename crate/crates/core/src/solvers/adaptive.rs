use serde::{Deserialize, Serialize};

use super::{dp_path, exhaustive_path, penalty, FitResult, PenaltySpec};
use crate::error::{Error, Result};
use crate::model::{transition_boundary, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Optimal partitioning; discontinuous splines only.
    Dp,
    /// Enumeration of knot vectors, refused above `budget` configurations.
    Exhaustive { budget: u128 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub k: usize,
    pub sse: f64,
    pub penalty: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveFit {
    pub fit: FitResult,
    pub trace: Vec<TraceEntry>,
}

impl AdaptiveFit {
    pub fn penalty_used(&self) -> f64 {
        self.trace[self.fit.k_selected - 1].penalty
    }
}

/// `min(k0 + 3, n/(d+1))`, at least 1.
pub fn default_k_max(d: usize, d0: i32, n: usize) -> Result<usize> {
    let k0 = transition_boundary(d, d0)?;
    Ok((k0 + 3).min(n / (d + 1)).max(1))
}

/// Minimizes `sse(k) + pen(k)` over `k` in `1..=k_max`; ties go to the
/// smallest `k`.
pub fn adaptive_fit(
    y: &[f64],
    params: &ModelParams,
    spec: &PenaltySpec,
    k_max: usize,
    solver: Solver,
) -> Result<AdaptiveFit> {
    if k_max == 0 {
        return Err(Error::param("k_max must be at least 1"));
    }
    let feasible = params.n / (params.d + 1);
    if k_max > feasible {
        return Err(Error::param(format!(
            "k_max = {k_max} exceeds the {feasible} pieces that fit in n = {}",
            params.n
        )));
    }
    let p = params.with_k(k_max);
    let path = match solver {
        Solver::Dp => dp_path(y, &p)?,
        Solver::Exhaustive { budget } => exhaustive_path(y, &p, budget)?,
    };
    let mut trace = Vec::with_capacity(k_max);
    let mut best = 0;
    for (i, f) in path.iter().enumerate() {
        let pen = penalty(i + 1, spec)?;
        let objective = f.sse + pen;
        trace.push(TraceEntry {
            k: i + 1,
            sse: f.sse,
            penalty: pen,
            objective,
        });
        if objective < trace[best].objective {
            best = i;
        }
    }
    let fit = path.into_iter().nth(best).expect("best index in range");
    Ok(AdaptiveFit { fit, trace })
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::transition_boundary;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub tau: f64,
    pub sigma: f64,
    pub d: usize,
    pub d0: i32,
    pub n: usize,
}

impl PenaltySpec {
    pub const DEFAULT_TAU: f64 = 2.5;
}

/// Rate-matched penalty: `tau sigma^2` times `1` for one piece,
/// `k loglog(16n/k)` up to the transition boundary, `k log(en/k)` beyond it.
pub fn penalty(k: usize, spec: &PenaltySpec) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("penalty needs k >= 1"));
    }
    if !(spec.tau > 0.0) {
        return Err(Error::param(format!("tau must be positive, got {}", spec.tau)));
    }
    let k0 = transition_boundary(spec.d, spec.d0)?;
    let n = spec.n as f64;
    let kf = k as f64;
    let shape = if k == 1 {
        1.0
    } else if k <= k0 {
        kf * (16.0 * n / kf).ln().ln()
    } else {
        kf * (std::f64::consts::E * n / kf).ln()
    };
    Ok(spec.tau * spec.sigma * spec.sigma * shape)
}

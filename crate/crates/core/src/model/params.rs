use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Problem configuration: degree `d`, continuity order `d0` (`-1` allows
/// jumps), piece budget `k`, sample size `n`, and noise level `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: usize,
    pub d0: i32,
    pub k: usize,
    pub n: usize,
    pub sigma: f64,
}

impl ModelParams {
    pub fn new(d: usize, d0: i32, k: usize, n: usize, sigma: f64) -> Result<Self> {
        check_continuity(d, d0)?;
        if k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        if n < d + 1 {
            return Err(Error::param(format!("n = {n} is below d + 1 = {}", d + 1)));
        }
        if !(sigma >= 0.0) {
            return Err(Error::param(format!("sigma must be non-negative, got {sigma}")));
        }
        Ok(Self { d, d0, k, n, sigma })
    }

    pub fn k0(&self) -> usize {
        // Validated at construction, so the formula cannot fail here.
        boundary(self.d, self.d0)
    }

    /// Number of coefficients freed at each inner knot.
    pub fn jump_dim(&self) -> usize {
        (self.d as i32 - self.d0) as usize
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_d0(mut self, d0: i32) -> Result<Self> {
        check_continuity(self.d, d0)?;
        self.d0 = d0;
        Ok(self)
    }
}

fn check_continuity(d: usize, d0: i32) -> Result<()> {
    if d0 < -1 || d0 > d as i32 - 1 {
        return Err(Error::param(format!(
            "continuity order d0 = {d0} outside [-1, {}]",
            d as i32 - 1
        )));
    }
    Ok(())
}

fn boundary(d: usize, d0: i32) -> usize {
    let m = (d as i32 - d0) as usize;
    (d + 1) / m + 1
}

/// Piece count `floor((d+1)/(d-d0)) + 1` at which the minimax rate changes
/// from the iterated-log to the log regime.
pub fn transition_boundary(d: usize, d0: i32) -> Result<usize> {
    check_continuity(d, d0)?;
    Ok(boundary(d, d0))
}

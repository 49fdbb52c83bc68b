use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Stream number for replicate `rep` of the grid cell with `n` points.
///
/// Every (cell, replicate) pair owns an independent ChaCha stream under the
/// master seed, so results do not depend on the order cells are run in.
pub fn stream_id(n: usize, rep: usize) -> u64 {
    ((n as u64) << 32) | (rep as u64 & 0xffff_ffff)
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` standard normal draws from the given stream.
pub fn noise(n: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, stream);
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// `Y = theta0 + sigma * eps`.
pub fn simulate(theta0: &[f64], sigma: f64, seed: u64, stream: u64) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) {
        return Err(Error::param(format!("sigma must be non-negative, got {sigma}")));
    }
    let eps = noise(theta0.len(), seed, stream);
    Ok(theta0.iter().zip(eps).map(|(t, e)| t + sigma * e).collect())
}

use serde::{Deserialize, Serialize};

use crate::error::KnotError;

/// Integer knots `0 = n_0 <= n_1 <= ... <= n_k = n`. Nonempty pieces hold
/// at least `d + 1` grid points; repeated knots encode empty pieces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KnotVector {
    knots: Vec<usize>,
    degree: usize,
}

pub fn validate_knots(knots: &[usize], d: usize, n: usize) -> Result<KnotVector, KnotError> {
    if knots.len() < 2 {
        return Err(KnotError::TooShort(knots.len()));
    }
    if knots[0] != 0 {
        return Err(KnotError::StartNotZero(knots[0]));
    }
    let last = *knots.last().unwrap();
    if last != n {
        return Err(KnotError::EndMismatch {
            expected: n,
            found: last,
        });
    }
    for (index, w) in knots.windows(2).enumerate() {
        let (prev, next) = (w[0], w[1]);
        if next < prev {
            return Err(KnotError::NonMonotone {
                index: index + 1,
                prev,
                next,
            });
        }
        let gap = next - prev;
        if gap > 0 && gap < d + 1 {
            return Err(KnotError::GapTooSmall {
                index: index + 1,
                gap,
                min: d + 1,
            });
        }
    }
    Ok(KnotVector {
        knots: knots.to_vec(),
        degree: d,
    })
}

impl KnotVector {
    /// Single piece covering the whole grid.
    pub fn trivial(d: usize, n: usize) -> Result<Self, KnotError> {
        validate_knots(&[0, n], d, n)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n(&self) -> usize {
        *self.knots.last().unwrap()
    }

    /// Number of pieces, empty ones included.
    pub fn pieces(&self) -> usize {
        self.knots.len() - 1
    }

    /// `(piece index, start, end)` for every piece with `start < end`.
    pub fn nonempty_pieces(&self) -> Vec<(usize, usize, usize)> {
        self.knots
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] > w[0])
            .map(|(p, w)| (p, w[0], w[1]))
            .collect()
    }

    pub fn nonempty_count(&self) -> usize {
        self.knots.windows(2).filter(|w| w[1] > w[0]).count()
    }

    /// Distinct breakpoints strictly inside `(0, n)`.
    pub fn inner_knots(&self) -> Vec<usize> {
        let n = self.n();
        let mut out: Vec<usize> = self
            .knots
            .iter()
            .copied()
            .filter(|&t| t > 0 && t < n)
            .collect();
        out.dedup();
        out
    }

    /// Same breakpoints, left-padded with zeros to `k + 1` entries.
    /// Existing leading empty pieces are absorbed first.
    pub fn padded(&self, k: usize) -> Option<KnotVector> {
        let lead = self.knots.iter().take_while(|&&t| t == 0).count() - 1;
        let core = &self.knots[lead..];
        if k + 1 < core.len() {
            return None;
        }
        let mut knots = vec![0; k + 1 - core.len()];
        knots.extend_from_slice(core);
        Some(KnotVector {
            knots,
            degree: self.degree,
        })
    }

    /// `n_{i;j} = (n_i - n_j)/n`.
    pub fn scaled_gap(&self, i: usize, j: usize) -> f64 {
        (self.knots[i] as f64 - self.knots[j] as f64) / self.n() as f64
    }

    /// Index of the piece holding grid point `t` in `1..=n`.
    pub fn piece_of(&self, t: usize) -> usize {
        // First knot position with n_{p+1} >= t; pieces are (n_p, n_{p+1}].
        let pos = self.knots.partition_point(|&x| x < t);
        pos.max(1) - 1
    }
}

use crate::error::Result;
use crate::model::transition_boundary;

/// Smallest `k` with `(k-2)(d+1) >= (k-1)(d0+1) + 1`, i.e. enough free
/// coefficients for a nonzero spline vanishing on both end pieces. Returned
/// with `k0 + 1` for comparison.
pub fn dof_min_pieces(d: usize, d0: i32) -> Result<(usize, usize)> {
    let k0 = transition_boundary(d, d0)?;
    let (d, d0) = (d as i64, d0 as i64);
    let mut k = 1i64;
    while (k - 2) * (d + 1) < (k - 1) * (d0 + 1) + 1 {
        k += 1;
    }
    Ok((k as usize, k0 + 1))
}

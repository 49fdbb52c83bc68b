use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// `sum_{j=0}^{n} C(n,j) P(j) (-1)^j` in exact integers, where
/// `P(j) = sum_r coeffs[r] j^r`. The sum vanishes whenever `deg P < n`;
/// larger degrees are refused.
pub fn binomial_identity_check(n: usize, coeffs: &[BigInt]) -> Result<BigInt> {
    let degree = coeffs.iter().rposition(|c| !c.is_zero());
    if let Some(deg) = degree {
        if deg >= n {
            return Err(Error::Precondition(format!(
                "polynomial degree {deg} is not below n = {n}"
            )));
        }
    }
    let mut total = BigInt::zero();
    let mut choose = BigInt::one();
    for j in 0..=n {
        let x = BigInt::from(j);
        let mut value = BigInt::zero();
        for c in coeffs.iter().rev() {
            value = value * &x + c;
        }
        let term = &choose * value;
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
        choose = choose * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    Ok(total)
}

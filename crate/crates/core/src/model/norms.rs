use super::piecewise::PiecewiseSpline;

/// Returns `(sum_t f(t/n)^2, n * int_0^1 f^2)`; the integral is exact per
/// piece from the polynomial coefficients.
pub fn discrete_vs_integral_l2(spline: &PiecewiseSpline) -> (f64, f64) {
    let n = spline.n();
    let nf = n as f64;
    let discrete = spline.evaluate().iter().map(|v| v * v).sum();
    let mut integral = 0.0;
    for (p, start, end) in spline.knots.nonempty_pieces() {
        let a = &spline.coeffs[p];
        let len = (end - start) as f64 / nf;
        for (i, ai) in a.iter().enumerate() {
            for (j, aj) in a.iter().enumerate() {
                let e = (i + j + 1) as i32;
                integral += ai * aj * len.powi(e) / e as f64;
            }
        }
    }
    (discrete, nf * integral)
}

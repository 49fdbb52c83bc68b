//! Browser bindings for the demo page. Every export returns a JSON string so
//! the page can stay plain JavaScript.

use freeknot::experiments::noise;
use freeknot::io::FitReport;
use freeknot::kernels::sparse_construct;
use freeknot::shape::shape_lse;
use freeknot::solvers::{adaptive_fit, Solver, DEFAULT_BUDGET};
use freeknot::{ModelParams, PenaltySpec};
use wasm_bindgen::prelude::*;

fn json(v: &FitReport) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// A piecewise test signal plus Gaussian noise. `shape` is "steps",
/// "kinks" or "bump".
#[wasm_bindgen]
pub fn noisy_signal(shape: &str, n: usize, sigma: f64, seed: u64) -> Result<Vec<f64>, String> {
    if n < 4 {
        return Err("n must be at least 4".into());
    }
    let x = |i: usize| (i + 1) as f64 / n as f64;
    let f: Box<dyn Fn(f64) -> f64> = match shape {
        "steps" => Box::new(|t| if t <= 0.3 { 0.0 } else if t <= 0.65 { 2.0 } else { -1.0 }),
        "kinks" => Box::new(|t| if t <= 0.4 { 4.0 * t } else { 1.6 - 3.0 * (t - 0.4) }.max(0.2)),
        "bump" => Box::new(|t| (1.0 - 16.0 * (t - 0.5) * (t - 0.5)).max(0.0) * 2.0),
        _ => return Err(format!("unknown shape {shape:?}")),
    };
    let eps = noise(n, seed, 0);
    Ok((0..n).map(|i| f(x(i)) + sigma * eps[i]).collect())
}

/// Penalized fit with the number of pieces chosen up to `k_max`.
/// Continuous classes go through enumeration and refuse large searches.
#[wasm_bindgen]
pub fn adaptive(y: Vec<f64>, d: usize, d0: i32, k_max: usize, sigma: f64, tau: f64) -> Result<String, String> {
    let n = y.len();
    let run = || -> freeknot::Result<FitReport> {
        let params = ModelParams::new(d, d0, k_max, n, sigma)?;
        let spec = PenaltySpec { tau, sigma, d, d0, n };
        let solver = if d0 < 0 { Solver::Dp } else { Solver::Exhaustive { budget: DEFAULT_BUDGET } };
        Ok(FitReport::from_adaptive(&adaptive_fit(&y, &params, &spec, k_max, solver)?, d0))
    };
    json(&run().map_err(|e| e.to_string())?)
}

/// d-monotone least squares with at most `k` pieces.
#[wasm_bindgen]
pub fn shape_fit(y: Vec<f64>, d: usize, k: usize) -> Result<String, String> {
    let fit = shape_lse(&y, d, k, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    json(&FitReport::from_shape(&fit))
}

/// Exact rational nullspace and the resulting sparse member, if any.
/// `n = 0` picks the default grid.
#[wasm_bindgen]
pub fn sparse(d: usize, d0: i32, k: usize, n: usize) -> Result<String, String> {
    let sys = sparse_construct(d, d0, k, (n > 0).then_some(n)).map_err(|e| e.to_string())?;
    Ok(sys.to_json().to_string())
}

//! Exact least-squares fitting over free-knot spline classes on an
//! equispaced grid, with shape-constrained variants, verification kernels
//! for the supporting algebra, and a Monte Carlo harness.
//!
//! Signals are vectors `theta` of length `n` with `theta[i-1] = f(i/n)`.
//! Knots are integer grid positions `0 = n_0 <= ... <= n_k = n`; piece `i`
//! covers the grid points `n_i < t <= n_{i+1}`.

pub mod checks;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod model;
pub mod shape;
pub mod solvers;

pub use error::{Error, KnotError, Result};
pub use model::{
    check_membership, transition_boundary, validate_knots, KnotVector, Membership, ModelParams,
    PiecewiseSpline,
};
pub use solvers::{
    adaptive_fit, dp_fit, exhaustive_fit, fit_given_knots, penalty, segment_cost, FitResult,
    PenaltySpec,
};

//! Spline classes, their parametrizations, and membership tests.

mod basis;
mod knots;
mod membership;
mod norms;
mod params;
mod piecewise;

pub use basis::{basis_dim, basis_matrix, global_from_piecewise, piecewise_from_global};
pub use knots::{validate_knots, KnotVector};
pub use membership::{check_membership, Membership, DEFAULT_MEMBERSHIP_TOL};
pub use norms::discrete_vs_integral_l2;
pub use params::{transition_boundary, ModelParams};
pub use piecewise::{transition_coefficient, PiecewiseSpline};

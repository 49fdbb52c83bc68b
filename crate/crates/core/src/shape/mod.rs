//! d-monotone splines: the sign-constrained canonical parametrization and
//! least-squares fits over it.

mod canonical;
mod coef;
mod fit;
mod nnls;

pub use canonical::{is_d_monotone, random_canonical, MonotoneCanonical};
pub use coef::{calibrate_coef_bound, coef_bound_statistic, random_unit_member, CoefCalibration};
pub use fit::{fit_shape_given_knots, shape_lse, ShapeFit};
pub use nnls::{mixed_nnls, NnlsSolution};

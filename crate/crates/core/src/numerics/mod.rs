//! Special functions and quadrature shared by every prior family.

mod quadrature;
mod special;

pub use quadrature::{integrate, integrate_with, Abscissa, Endpoint, QuadratureResult, QuadratureSpec};
pub use special::{log_gamma, log_gamma_diff, log_inv_beta};

pub(crate) use special::{log_gamma_diff_unchecked, log_inv_beta_unchecked};

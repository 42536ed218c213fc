//! Closed-form quantities.
//!
//! - [`falling`]: Laplace transform and mean of the time to fall into the band
//! - [`moments`]: occupation probabilities, mean and variance of `X(t)`
//! - [`joint`]: joint law of `X(t)` and the switch count (symmetric model)
//! - [`telegraph`]: law, moments and covariance of the driving telegraph process

mod distribution;
pub mod falling;
pub mod joint;
pub mod moments;
pub mod telegraph;

pub use distribution::{Atom, MixedDistribution};
pub use falling::{
    hyper_quad, laplace_falling, laplace_falling_special, laplace_falling_summed, mean_falling, mean_falling_finite_difference,
    mean_falling_series, minor_root_slope, HyperQuad,
    MeanFalling, MeanMethod, SpecialCase,
};
pub use joint::{joint_density, joint_law, tau_cross, TauBranch};
pub use moments::{
    kac_limit_reference, mean_x, mean_x_symmetric, mgf_gamma, occupation_probs, var_x_symmetric, OccupationProbs,
};

pub use telegraph::{
    mgf_restricted, telegraph_cov, telegraph_cov_series, telegraph_density, telegraph_mean, telegraph_moment,
    telegraph_moment_summed, telegraph_second_moment, MomentOrder,
};

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadControl};

/// Integrates an integrand whose evaluation can fail; the first failure is
/// returned instead of a quadrature error.
pub(crate) fn integrate_fallible(
    f: impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    ctl: &QuadControl,
) -> Result<f64> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let out = quadrature::integrate(
        |s| match f(s) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
        ctl,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => out,
    }
}

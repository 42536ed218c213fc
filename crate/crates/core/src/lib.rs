//! Ornstein–Uhlenbeck process of bounded variation.
//!
//! `X` solves `dX = (a_ε − γ_ε X) dt` where `ε` is a two-state Markov chain
//! switching at rates `λ0`, `λ1`. Paths are piecewise deterministic, so they
//! can be simulated exactly; many of their laws have closed forms.
//!
//! - [`model`]: parameters, flows and the attracting band
//! - [`specfun`]: hypergeometric, Kummer and Bessel series
//! - [`analytic`]: closed forms for the falling time, moments and densities
//! - [`simulate`]: exact path simulation and Monte Carlo estimators
//! - [`harness`]: closed form vs Monte Carlo validation checks

// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod harness;
pub mod model;
pub mod quadrature;
pub mod simulate;
pub mod specfun;

pub use error::{Error, Result};
pub use model::{band, band_coordinate, pattern, symmetric_reduction, t_star, Band, ModelParams, Regime};
pub use specfun::SeriesControl;

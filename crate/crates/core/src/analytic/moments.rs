//! Regime occupation probabilities and the first two moments of `X(t)`.

use super::integrate_fallible;
use crate::error::{Error, Result};
use crate::model::{ModelParams, Regime};
use crate::quadrature::QuadControl;
use crate::specfun::{psi_pair, SeriesControl};

/// `p[i][j] = P{ε(s) = j | ε(0) = i}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupationProbs {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

impl OccupationProbs {
    pub fn get(&self, from: Regime, to: Regime) -> f64 {
        match (from, to) {
            (Regime::R0, Regime::R0) => self.p00,
            (Regime::R0, Regime::R1) => self.p01,
            (Regime::R1, Regime::R0) => self.p10,
            (Regime::R1, Regime::R1) => self.p11,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Transition probabilities of the two-state switching chain, summed over
/// even (stay) and odd (leave) switch counts.
pub fn occupation_probs(s: f64, params: &ModelParams, ctl: &SeriesControl) -> Result<OccupationProbs> {
    check_time(s)?;
    let (l0, l1) = (params.lambda0(), params.lambda1());
    let (e0, o0) = psi_pair(s, (l0 - l1) * s, params, ctl)?;
    let (e1, o1) = psi_pair(s, (l1 - l0) * s, params, ctl)?;
    let clamp = |p: f64| p.clamp(0.0, 1.0);
    Ok(OccupationProbs {
        p00: clamp((-l0 * s).exp() * (1.0 + e0)),
        p01: clamp(l0 * (-l0 * s).exp() * o0),
        p10: clamp(l1 * (-l1 * s).exp() * o1),
        p11: clamp((-l1 * s).exp() * (1.0 + e1)),
    })
}

/// `E_i[exp(-Γ(t))]` with `Γ(t) = ∫_0^t γ_{ε(s)} ds`.
pub fn mgf_gamma(t: f64, start: Regime, params: &ModelParams, ctl: &SeriesControl) -> Result<f64> {
    check_time(t)?;
    let (l0, l1, g0, g1) = (params.lambda0(), params.lambda1(), params.gamma0(), params.gamma1());
    let c = l0 - l1 + g0 - g1;
    let (rate, kill, z) = match start {
        Regime::R0 => (l0, l0 + g0, c * t),
        Regime::R1 => (l1, l1 + g1, -c * t),
    };
    let (even, odd) = psi_pair(t, z, params, ctl)?;
    Ok((-kill * t).exp() * (1.0 + even + rate * odd))
}

/// `E_i[X(t)]` for general parameters:
///
/// ```text
/// x ψ_i(t) + ∫_0^t [a0 π_i0(s) ψ_0(t-s) + a1 π_i1(s) ψ_1(t-s)] ds
/// ```
pub fn mean_x(
    t: f64,
    x: f64,
    start: Regime,
    params: &ModelParams,
    ctl: &SeriesControl,
    quad: &QuadControl,
) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(x);
    }
    let (a0, a1) = (params.a0(), params.a1());
    let integral = integrate_fallible(
        |s| {
            let pi = occupation_probs(s, params, ctl)?;
            let m0 = mgf_gamma(t - s, Regime::R0, params, ctl)?;
            let m1 = mgf_gamma(t - s, Regime::R1, params, ctl)?;
            Ok(a0 * pi.get(start, Regime::R0) * m0 + a1 * pi.get(start, Regime::R1) * m1)
        },
        0.0,
        t,
        quad,
    )?;
    Ok(x * mgf_gamma(t, start, params, ctl)? + integral)
}

/// `e^{-γt} ∫_0^t e^{(γ-2λ)s} ds`, written so that neither `γ = 2λ` nor
/// large `t` loses accuracy.
fn damped_ramp(t: f64, lambda: f64, gamma: f64) -> f64 {
    let d = gamma - 2.0 * lambda;
    let u = d * t;
    if t == 0.0 {
        0.0
    } else if d.abs() <= 1e-9 * gamma.max(2.0 * lambda) {
        t * (-gamma * t).exp()
    } else if u.abs() < 1.0 {
        (-gamma * t).exp() * t * u.exp_m1() / u
    } else {
        ((-2.0 * lambda * t).exp() - (-gamma * t).exp()) / d
    }
}

/// `E_i[X(t)]` when `λ0 = λ1`, `γ0 = γ1` and `a0 = -a1`.
pub fn mean_x_symmetric(t: f64, x: f64, start: Regime, params: &ModelParams) -> Result<f64> {
    check_time(t)?;
    let (lambda, a, gamma) = params.symmetric_parts()?;
    let sign = match start {
        Regime::R0 => 1.0,
        Regime::R1 => -1.0,
    };
    Ok(x * (-gamma * t).exp() + sign * a * damped_ramp(t, lambda, gamma))
}

/// `Var X(t)` in the symmetric model; it does not depend on the start regime.
pub fn var_x_symmetric(t: f64, params: &ModelParams) -> Result<f64> {
    check_time(t)?;
    let (lambda, a, gamma) = params.symmetric_parts()?;
    let g = damped_ramp(t, lambda, gamma);
    let k = gamma + 2.0 * lambda;
    let decay = (-gamma * t).exp();
    let v = a * a * (-(-2.0 * gamma * t).exp_m1() / (gamma * k) - 2.0 * decay * g / k - g * g);
    Ok(v.max(0.0))
}

/// Mean and variance of the Ornstein-Uhlenbeck process
/// `dY = -γ Y dt + σ dW` started at `x`.
pub fn kac_limit_reference(t: f64, x: f64, gamma: f64, sigma: f64) -> Result<(f64, f64)> {
    check_time(t)?;
    if !(gamma > 0.0) {
        return Err(Error::InvalidParams(format!("gamma must be positive, got {gamma}")));
    }
    let mean = x * (-gamma * t).exp();
    let var = -sigma * sigma / (2.0 * gamma) * (-2.0 * gamma * t).exp_m1();
    Ok((mean, var))
}

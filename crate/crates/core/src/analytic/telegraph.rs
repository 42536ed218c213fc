//! The driving telegraph process `T(t) = ∫_0^t a_{ε(s)} ds`: its law split
//! by the final regime, its first two moments, the product moment
//! `E_i[T(t) T(s)]` and the moment generating function restricted to a
//! fixed number of switches.

use super::distribution::{Atom, MixedDistribution};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Regime};
use crate::specfun::{bessel_i, gh_coefficient, kummer_phi, sum_series, BesselOrder, GhKind, SeriesControl, Summed};

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Law of `T(t)` on `ε(t) = j` given `ε(0) = i`. Writing `ξ` for the time
/// spent in regime 0, the continuous part is a Bessel kernel in
/// `ξ (t - ξ)`; when `i = j` there is an atom for the no-switch path.
pub fn telegraph_density(
    i: Regime,
    j: Regime,
    t: f64,
    params: &ModelParams,
    ctl: &SeriesControl,
) -> Result<MixedDistribution> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("telegraph density needs finite t > 0, got {t}")));
    }
    let (a0, a1) = (params.a0(), params.a1());
    if !(a0 > a1) {
        return Err(Error::InvalidParams(format!("telegraph density needs a0 > a1, got a0={a0}, a1={a1}")));
    }
    let (l0, l1) = (params.lambda0(), params.lambda1());
    let width = a0 - a1;
    let ctl = *ctl;
    let kernel = move |y: f64| -> f64 {
        let xi = (y - a1 * t) / width;
        let rest = t - xi;
        if !(xi > 0.0 && rest > 0.0) {
            return 0.0;
        }
        let damp = (-l0 * xi - l1 * rest).exp();
        let arg = 2.0 * (l0 * l1 * xi * rest).sqrt();
        let bessel = |order| bessel_i(order, arg, &ctl).unwrap_or(f64::NAN);
        match (i, j) {
            (Regime::R0, Regime::R0) => (l0 * l1).sqrt() / width * (xi / rest).sqrt() * damp * bessel(BesselOrder::I1),
            (Regime::R1, Regime::R1) => (l0 * l1).sqrt() / width * (rest / xi).sqrt() * damp * bessel(BesselOrder::I1),
            (Regime::R0, Regime::R1) => l0 / width * damp * bessel(BesselOrder::I0),
            (Regime::R1, Regime::R0) => l1 / width * damp * bessel(BesselOrder::I0),
        }
    };
    let atoms = if i == j {
        vec![Atom {
            location: params.velocity(i) * t,
            mass: (-params.lambda(i) * t).exp(),
        }]
    } else {
        Vec::new()
    };
    Ok(MixedDistribution::new(atoms, (a1 * t, a0 * t), kernel))
}

/// First or second moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentOrder {
    First,
    Second,
}

fn symmetric_speed(params: &ModelParams) -> Result<f64> {
    if params.has_symmetric_velocities() {
        Ok(params.a0())
    } else {
        Err(Error::NotSymmetric("a0 = -a1 > 0"))
    }
}

/// `E_i[T(t)^k 1{ε(t) = j}]` for `k` in `{1, 2}`, with the number of terms.
/// Requires `a0 = -a1`.
pub fn telegraph_moment_summed(
    order: MomentOrder,
    i: Regime,
    j: Regime,
    t: f64,
    params: &ModelParams,
    ctl: &SeriesControl,
) -> Result<Summed> {
    check_time(t)?;
    let a = symmetric_speed(params)?;
    if t == 0.0 {
        return Ok(Summed { value: 0.0, terms: 0 });
    }
    let (l0, l1) = (params.lambda0(), params.lambda1());
    let rate2 = l0 * l1;
    // even (i = j) terms carry (λ0λ1)^n t^{2n}/(2n)!, odd terms λ_i (λ0λ1)^n t^{2n+1}/(2n+1)!
    let even = i == j;
    let lead = if even { 1.0 } else { params.lambda(i) * t };
    let (kind, power) = match (order, even) {
        (MomentOrder::First, true) => (GhKind::G1, 1),
        (MomentOrder::First, false) => (GhKind::H1, 1),
        (MomentOrder::Second, true) => (GhKind::G2, 2),
        (MomentOrder::Second, false) => (GhKind::H2, 2),
    };
    let mirror = match i {
        Regime::R0 => t,
        Regime::R1 => -t,
    };
    let sign = match (order, i) {
        (MomentOrder::First, Regime::R1) => -1.0,
        _ => 1.0,
    };
    let scale = sign * a.powi(power) * t.powi(power) * (-params.lambda(i) * t).exp() * lead;
    let first = gh_coefficient(kind, 0, mirror, params, ctl)?;
    let mut coeff = 1.0;
    let mut failure = None;
    let offset = if even { 0.0 } else { 1.0 };
    let s = sum_series("telegraph moment series", first, ctl, |n| {
        let k = n as f64;
        coeff *= rate2 * t * t / ((2.0 * k - 1.0 + offset) * (2.0 * k + offset));
        if coeff == 0.0 {
            return 0.0;
        }
        match gh_coefficient(kind, n, mirror, params, ctl) {
            Ok(g) => coeff * g,
            Err(e) => {
                failure = Some(e);
                f64::NAN
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let s = s?;
    Ok(Summed {
        value: scale * s.value,
        terms: s.terms,
    })
}

pub fn telegraph_moment(
    order: MomentOrder,
    i: Regime,
    j: Regime,
    t: f64,
    params: &ModelParams,
    ctl: &SeriesControl,
) -> Result<f64> {
    telegraph_moment_summed(order, i, j, t, params, ctl).map(|s| s.value)
}

/// `E_i[T(t)]`.
pub fn telegraph_mean(i: Regime, t: f64, params: &ModelParams, ctl: &SeriesControl) -> Result<f64> {
    Ok(telegraph_moment(MomentOrder::First, i, Regime::R0, t, params, ctl)?
        + telegraph_moment(MomentOrder::First, i, Regime::R1, t, params, ctl)?)
}

/// `E_i[T(t)^2]`.
pub fn telegraph_second_moment(i: Regime, t: f64, params: &ModelParams, ctl: &SeriesControl) -> Result<f64> {
    Ok(telegraph_moment(MomentOrder::Second, i, Regime::R0, t, params, ctl)?
        + telegraph_moment(MomentOrder::Second, i, Regime::R1, t, params, ctl)?)
}

fn check_pair(t: f64, s: f64) -> Result<()> {
    check_time(t)?;
    check_time(s)?;
    if s > t {
        return Err(Error::Domain(format!("product moment needs s <= t, got s={s}, t={t}")));
    }
    Ok(())
}

/// `E_i[T(t) T(s)]` for `s <= t` from the moment series, using the Markov
/// property at time `s`.
pub fn telegraph_cov_series(i: Regime, t: f64, s: f64, params: &ModelParams, ctl: &SeriesControl) -> Result<f64> {
    check_pair(t, s)?;
    let gap = t - s;
    let mut total = telegraph_second_moment(i, s, params, ctl)?;
    for j in Regime::BOTH {
        total += telegraph_mean(j, gap, params, ctl)? * telegraph_moment(MomentOrder::First, i, j, s, params, ctl)?;
    }
    Ok(total)
}

/// `E_i[T(t) T(s)]` for `s <= t`. Closed form when `λ0 = λ1 > 0`.
pub fn telegraph_cov(i: Regime, t: f64, s: f64, params: &ModelParams, ctl: &SeriesControl) -> Result<f64> {
    check_pair(t, s)?;
    let a = symmetric_speed(params)?;
    let lambda = params.lambda0();
    if lambda == params.lambda1() && lambda > 0.0 {
        let lhs = 4.0 * lambda * s;
        let rhs = (1.0 + (-2.0 * lambda * (t - s)).exp()) * -(-2.0 * lambda * s).exp_m1();
        return Ok(a * a / (4.0 * lambda * lambda) * (lhs - rhs));
    }
    telegraph_cov_series(i, t, s, params, ctl)
}

/// `E_i[exp(z T(t)) 1{N(t) = n}]`. Requires `a0 = -a1`.
pub fn mgf_restricted(z: f64, t: f64, n: u32, start: Regime, params: &ModelParams, ctl: &SeriesControl) -> Result<f64> {
    check_time(t)?;
    let a = symmetric_speed(params)?;
    let (l0, l1) = (params.lambda0(), params.lambda1());
    let beta = 0.5 * (l0 - l1);
    let (arg, base) = match start {
        Regime::R0 => (2.0 * (beta - a * z) * t, -(l0 - a * z) * t),
        Regime::R1 => (2.0 * (a * z - beta) * t, -(l1 + a * z) * t),
    };
    let m = n / 2;
    let mf = m as f64;
    // log of the rate and time prefactor, to survive large n
    let ln_fact = |k: u32| (1..=k).map(|v| (v as f64).ln()).sum::<f64>();
    let log_rate = |e0: f64, e1: f64| -> f64 {
        let part = |e: f64, l: f64| if e == 0.0 { 0.0 } else { e * l.ln() };
        part(e0, l0) + part(e1, l1)
    };
    let (e0, e1, alpha, gamma) = if n.is_multiple_of(2) {
        (mf, mf, mf, 2.0 * mf + 1.0)
    } else {
        match start {
            Regime::R0 => (mf + 1.0, mf, mf + 1.0, 2.0 * mf + 2.0),
            Regime::R1 => (mf, mf + 1.0, mf + 1.0, 2.0 * mf + 2.0),
        }
    };
    if n > 0 && ((e0 > 0.0 && l0 == 0.0) || (e1 > 0.0 && l1 == 0.0) || t == 0.0) {
        return Ok(0.0);
    }
    let log_pref = log_rate(e0, e1) + n as f64 * if n > 0 { t.ln() } else { 0.0 } - ln_fact(n) + base;
    Ok(log_pref.exp() * kummer_phi(alpha, gamma, arg, ctl)?)
}

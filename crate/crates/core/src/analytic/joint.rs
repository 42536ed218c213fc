//! Joint law of `X(t)` and the number of switches `N(t) <= 2` in the
//! symmetric model (`λ0 = λ1 = λ`, `γ0 = γ1 = γ`, `a0 = -a1 = a`).
//!
//! After one switch the endpoint `y` fixes the switching epoch; after two
//! switches it fixes a curve of epoch pairs whose length gives the density.

use super::distribution::{Atom, MixedDistribution};
use crate::error::{Error, Result};
use crate::model::{pattern, ModelParams, Regime};

/// Which crossing epoch [`tau_cross`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauBranch {
    /// Single switch 0 → 1 at `τ0`.
    Tau0,
    /// Single switch 1 → 0 at `τ1`.
    Tau1,
}

/// `I(x, t) = [φ1(x, t), φ0(x, t)]`, the reachable set at time `t`.
fn reachable(x: f64, t: f64, params: &ModelParams) -> (f64, f64) {
    (pattern(Regime::R1, x, t, params), pattern(Regime::R0, x, t, params))
}

fn check_inputs(t: f64, x: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() || !x.is_finite() {
        return Err(Error::Domain(format!("need finite t >= 0 and finite x, got t={t}, x={x}")));
    }
    Ok(())
}

/// Epoch of the single switch that moves the path from `x` to `y` in time `t`.
pub fn tau_cross(branch: TauBranch, y: f64, t: f64, x: f64, params: &ModelParams) -> Result<f64> {
    check_inputs(t, x)?;
    let (_, a, gamma) = params.symmetric_parts()?;
    let (lo, hi) = reachable(x, t, params);
    let slack = 1e-12 * (lo.abs() + hi.abs()).max(a / gamma);
    if !(y >= lo - slack && y <= hi + slack) {
        return Err(Error::Domain(format!("y = {y} lies outside the reachable interval [{lo}, {hi}]")));
    }
    let decay = (-gamma * t).exp();
    let arg = match branch {
        TauBranch::Tau0 => a + gamma * y + (a - gamma * x) * decay,
        TauBranch::Tau1 => a - gamma * y + (a + gamma * x) * decay,
    };
    let tau = t + (arg / (2.0 * a)).ln() / gamma;
    Ok(tau.clamp(0.0, t))
}

/// `(τ0 + τ1 - t) / (2 a u)` where `u` is the distance from the near end of
/// the interval in units of `2a/γ`; stable as `u → 0`.
fn two_switch_kernel(u: f64, a: f64, gamma: f64, t: f64) -> f64 {
    let gt = gamma * t;
    if u == 0.0 {
        return gt.exp_m1() / (2.0 * a * gamma);
    }
    let far = if gt < 30.0 { (u * gt.exp()).ln_1p() } else { ((-gt).exp() + u).ln() + gt };
    ((-u).ln_1p() + far) / (2.0 * a * gamma * u)
}

/// Density at `y` of `X(t)` on the event `N(t) = n`, for `n` in `{1, 2}`.
/// For `n = 0` the law is a single atom (see [`joint_law`]) and the
/// density is zero.
pub fn joint_density(y: f64, t: f64, n: u32, x: f64, start: Regime, params: &ModelParams) -> Result<f64> {
    check_inputs(t, x)?;
    let (lambda, a, gamma) = params.symmetric_parts()?;
    if n > 2 {
        return Err(Error::Domain(format!("joint density is available for n <= 2, got {n}")));
    }
    let (lo, hi) = reachable(x, t, params);
    if n == 0 || !(lo < y && y < hi) {
        return Ok(0.0);
    }
    let decay = (-gamma * t).exp();
    let weight = (-lambda * t).exp();
    Ok(match (n, start) {
        (1, Regime::R0) => lambda * weight / (a + gamma * y + (a - gamma * x) * decay),
        (1, Regime::R1) => lambda * weight / (a - gamma * y + (a + gamma * x) * decay),
        (_, Regime::R0) => {
            let u = (a - gamma * y + (gamma * x - a) * decay) / (2.0 * a);
            lambda * lambda * weight * two_switch_kernel(u.clamp(0.0, 1.0), a, gamma, t)
        }
        (_, Regime::R1) => {
            let u = (a + gamma * y - (gamma * x + a) * decay) / (2.0 * a);
            lambda * lambda * weight * two_switch_kernel(u.clamp(0.0, 1.0), a, gamma, t)
        }
    })
}

/// Sub-probability law of `X(t)` on `N(t) = n`.
pub fn joint_law(t: f64, n: u32, x: f64, start: Regime, params: &ModelParams) -> Result<MixedDistribution> {
    check_inputs(t, x)?;
    let (lambda, _, _) = params.symmetric_parts()?;
    if n > 2 {
        return Err(Error::Domain(format!("joint density is available for n <= 2, got {n}")));
    }
    if n == 0 {
        return Ok(MixedDistribution::atoms_only(vec![Atom {
            location: pattern(start, x, t, params),
            mass: (-lambda * t).exp(),
        }]));
    }
    let p = *params;
    Ok(MixedDistribution::new(Vec::new(), reachable(x, t, params), move |y| {
        joint_density(y, t, n, x, start, &p).unwrap_or(f64::NAN)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadControl;
    use proptest::prelude::*;

    fn unit() -> ModelParams {
        ModelParams::symmetric(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn tau_endpoints() {
        let p = unit();
        let (x, t) = (0.3, 1.2);
        let (lo, hi) = reachable(x, t, &p);
        assert!(tau_cross(TauBranch::Tau0, lo, t, x, &p).unwrap().abs() < 1e-14);
        assert!(tau_cross(TauBranch::Tau1, hi, t, x, &p).unwrap().abs() < 1e-14);
        assert!((tau_cross(TauBranch::Tau0, hi, t, x, &p).unwrap() - t).abs() < 1e-14);
        assert!(tau_cross(TauBranch::Tau0, hi + 0.1, t, x, &p).is_err());
        let q = ModelParams::new(1.0, 2.0, 1.0, -1.0, 1.0, 1.0).unwrap();
        assert!(matches!(tau_cross(TauBranch::Tau0, 0.0, t, x, &q), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn tau_round_trip() {
        let p = ModelParams::symmetric(0.7, 1.3, 0.6).unwrap();
        let (x, t) = (-0.4, 2.5);
        for &frac in &[0.1, 0.5, 0.9] {
            let tau = frac * t;
            let y = pattern(Regime::R1, pattern(Regime::R0, x, tau, &p), t - tau, &p);
            assert!((tau_cross(TauBranch::Tau0, y, t, x, &p).unwrap() - tau).abs() < 1e-12);
            let y = pattern(Regime::R0, pattern(Regime::R1, x, tau, &p), t - tau, &p);
            assert!((tau_cross(TauBranch::Tau1, y, t, x, &p).unwrap() - tau).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_switch_atom() {
        let p = unit();
        let law = joint_law(1.0, 0, 0.0, Regime::R0, &p).unwrap();
        assert_eq!(law.atoms.len(), 1);
        assert!((law.atoms[0].location - pattern(Regime::R0, 0.0, 1.0, &p)).abs() < 1e-15);
        assert!((law.atoms[0].mass - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(joint_density(0.2, 1.0, 0, 0.0, Regime::R0, &p).unwrap(), 0.0);
        assert!(joint_density(0.2, 1.0, 3, 0.0, Regime::R0, &p).is_err());
    }

    #[test]
    fn masses_match_poisson_counts() {
        let quad = QuadControl::default();
        for &(lambda, a, gamma, x, t) in &[(1.0, 1.0, 1.0, 0.0, 1.0), (2.5, 0.8, 0.4, 0.9, 1.7), (0.3, 2.0, 3.0, -0.2, 0.6)] {
            let p = ModelParams::symmetric(lambda, a, gamma).unwrap();
            let lt: f64 = lambda * t;
            for start in Regime::BOTH {
                let m1 = joint_law(t, 1, x, start, &p).unwrap().continuous_mass(&quad).unwrap();
                let m2 = joint_law(t, 2, x, start, &p).unwrap().continuous_mass(&quad).unwrap();
                assert!((m1 - lt * (-lt).exp()).abs() < 1e-8, "{m1}");
                assert!((m2 - lt * lt / 2.0 * (-lt).exp()).abs() < 1e-8, "{m2}");
            }
        }
    }

    #[test]
    fn two_switch_kernel_is_continuous_at_zero() {
        let limit = two_switch_kernel(0.0, 1.3, 0.7, 2.0);
        let near = two_switch_kernel(1e-9, 1.3, 0.7, 2.0);
        assert!((near - limit).abs() < 1e-7 * limit);
        let far = two_switch_kernel(0.3, 1.0, 1.0, 100.0);
        let direct = ((0.7f64).ln() + ((-100.0f64).exp() + 0.3).ln() + 100.0) / (2.0 * 0.3);
        assert!((far - direct).abs() < 1e-12 * direct);
    }

    proptest! {
        #[test]
        fn mirror_identity(lambda in 0.1..3.0f64, a in 0.2..2.0f64, gamma in 0.1..3.0f64,
                           x in -2.0..2.0f64, t in 0.05..4.0f64, u in 0.01..0.99f64, n in 1u32..=2) {
            let p = ModelParams::symmetric(lambda, a, gamma).unwrap();
            let (lo, hi) = reachable(x, t, &p);
            let y = lo + u * (hi - lo);
            let f0 = joint_density(y, t, n, x, Regime::R0, &p).unwrap();
            let f1 = joint_density(-y, t, n, -x, Regime::R1, &p).unwrap();
            prop_assert!((f0 - f1).abs() <= 1e-12 * f0.abs().max(1e-300), "{} vs {}", f0, f1);
        }

        #[test]
        fn tau_pair_identity(gamma in 0.1..3.0f64, a in 0.2..2.0f64, x in -2.0..2.0f64,
                             t in 0.05..4.0f64, u in 0.0..=1.0f64) {
            let p = ModelParams::symmetric(1.0, a, gamma).unwrap();
            let (lo, hi) = reachable(x, t, &p);
            let y = lo + u * (hi - lo);
            let t0 = tau_cross(TauBranch::Tau0, y, t, x, &p).unwrap();
            let t1 = tau_cross(TauBranch::Tau1, y, t, x, &p).unwrap();
            let lhs = (-gamma * (t - t0)).exp() + (-gamma * (t - t1)).exp();
            prop_assert!((lhs - 1.0 - (-gamma * t).exp()).abs() < 1e-10);
        }
    }
}

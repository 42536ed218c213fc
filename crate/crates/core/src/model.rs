//! Model parameters, the two deterministic flows and the attracting band.
//!
//! Between switches the process relaxes exponentially towards `a_i / gamma_i`:
//!
//! ```text
//! pattern_i(x, t) = a_i/gamma_i + (x - a_i/gamma_i) exp(-gamma_i t)
//! ```
//!
//! The interval `(a1/gamma1, a0/gamma0)` is invariant under both flows.

use crate::error::{Error, Result};

/// Velocity regime of the driving two-state chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    R0,
    R1,
}

impl Regime {
    pub const BOTH: [Regime; 2] = [Regime::R0, Regime::R1];

    pub fn index(self) -> usize {
        match self {
            Regime::R0 => 0,
            Regime::R1 => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Regime> {
        match i {
            0 => Some(Regime::R0),
            1 => Some(Regime::R1),
            _ => None,
        }
    }

    pub fn flip(self) -> Regime {
        match self {
            Regime::R0 => Regime::R1,
            Regime::R1 => Regime::R0,
        }
    }
}

/// The six constants of the model.
///
/// Switching rates may be zero (a regime with zero rate never leaves), the
/// relaxation rates must be positive and the band must be non-empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    lambda: [f64; 2],
    a: [f64; 2],
    gamma: [f64; 2],
}

impl ModelParams {
    pub fn new(
        lambda0: f64,
        lambda1: f64,
        a0: f64,
        a1: f64,
        gamma0: f64,
        gamma1: f64,
    ) -> Result<Self> {
        let named = [
            ("lambda0", lambda0),
            ("lambda1", lambda1),
            ("a0", a0),
            ("a1", a1),
            ("gamma0", gamma0),
            ("gamma1", gamma1),
        ];
        for (name, v) in named {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        if gamma0 <= 0.0 {
            return Err(Error::InvalidParams(format!("gamma0 > 0 violated (gamma0 = {gamma0})")));
        }
        if gamma1 <= 0.0 {
            return Err(Error::InvalidParams(format!("gamma1 > 0 violated (gamma1 = {gamma1})")));
        }
        if lambda0 < 0.0 {
            return Err(Error::InvalidParams(format!("lambda0 >= 0 violated (lambda0 = {lambda0})")));
        }
        if lambda1 < 0.0 {
            return Err(Error::InvalidParams(format!("lambda1 >= 0 violated (lambda1 = {lambda1})")));
        }
        if a1 / gamma1 >= a0 / gamma0 {
            return Err(Error::InvalidParams(format!(
                "a1/gamma1 < a0/gamma0 violated ({} >= {})",
                a1 / gamma1,
                a0 / gamma0
            )));
        }
        Ok(ModelParams {
            lambda: [lambda0, lambda1],
            a: [a0, a1],
            gamma: [gamma0, gamma1],
        })
    }

    /// Fully symmetric model: equal rates, velocities `±a`, common `gamma`.
    pub fn symmetric(lambda: f64, a: f64, gamma: f64) -> Result<Self> {
        Self::new(lambda, lambda, a, -a, gamma, gamma)
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda[0]
    }
    pub fn lambda1(&self) -> f64 {
        self.lambda[1]
    }
    pub fn a0(&self) -> f64 {
        self.a[0]
    }
    pub fn a1(&self) -> f64 {
        self.a[1]
    }
    pub fn gamma0(&self) -> f64 {
        self.gamma[0]
    }
    pub fn gamma1(&self) -> f64 {
        self.gamma[1]
    }

    pub fn lambda(&self, r: Regime) -> f64 {
        self.lambda[r.index()]
    }
    pub fn velocity(&self, r: Regime) -> f64 {
        self.a[r.index()]
    }
    pub fn gamma(&self, r: Regime) -> f64 {
        self.gamma[r.index()]
    }

    /// Attractor `a_r / gamma_r` of regime `r`.
    pub fn attractor(&self, r: Regime) -> f64 {
        self.a[r.index()] / self.gamma[r.index()]
    }

    /// Width `a0/gamma0 - a1/gamma1` of the band (always positive).
    pub fn band_width(&self) -> f64 {
        self.attractor(Regime::R0) - self.attractor(Regime::R1)
    }

    pub fn is_symmetric(&self) -> bool {
        self.lambda[0] == self.lambda[1] && self.gamma[0] == self.gamma[1] && self.a[0] == -self.a[1]
    }

    pub fn has_symmetric_velocities(&self) -> bool {
        self.a[0] == -self.a[1] && self.a[0] > 0.0
    }

    /// Common `(lambda, a, gamma)` of a fully symmetric model.
    pub fn symmetric_parts(&self) -> Result<(f64, f64, f64)> {
        if self.is_symmetric() {
            Ok((self.lambda[0], self.a[0], self.gamma[0]))
        } else {
            Err(Error::NotSymmetric("lambda0 = lambda1, gamma0 = gamma1, a0 = -a1"))
        }
    }
}

/// The attracting interval `(a1/gamma1, a0/gamma0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub low: f64,
    pub high: f64,
}

impl Band {
    pub fn contains(&self, x: f64) -> bool {
        self.low < x && x < self.high
    }
}

pub fn band(params: &ModelParams) -> Band {
    Band {
        low: params.attractor(Regime::R1),
        high: params.attractor(Regime::R0),
    }
}

/// Deterministic flow of regime `regime` for a duration `t >= 0`.
pub fn pattern(regime: Regime, x: f64, t: f64, params: &ModelParams) -> f64 {
    if t == 0.0 {
        return x;
    }
    // this form never overshoots the attractor
    let c = params.attractor(regime);
    c + (x - c) * (-params.gamma(regime) * t).exp()
}

/// Shortest time to reach `a0/gamma0` from `x`, i.e. the crossing time along
/// the regime-1 flow without any switch.
pub fn t_star(x: f64, params: &ModelParams) -> Result<f64> {
    let level = params.attractor(Regime::R0);
    if !(x >= level) {
        return Err(Error::Domain(format!("x must exceed a0/gamma0 = {level}, got {x}")));
    }
    let low = params.attractor(Regime::R1);
    Ok(((x - level) / (level - low)).ln_1p() / params.gamma1())
}

/// `z(x) = (a0/gamma0 - x) / (a0/gamma0 - a1/gamma1)`; zero at the upper band
/// edge, one at the lower edge, negative above the band.
pub fn band_coordinate(x: f64, params: &ModelParams) -> f64 {
    (params.attractor(Regime::R0) - x) / params.band_width()
}

/// Drift and half-spread `((a0 + a1)/2, (a0 - a1)/2)` reducing a general
/// velocity pair to a symmetric one.
pub fn symmetric_reduction(params: &ModelParams) -> (f64, f64) {
    ((params.a0() + params.a1()) / 2.0, (params.a0() - params.a1()) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> ModelParams {
        ModelParams::symmetric(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn band_is_ratio_pair() {
        let p = ModelParams::new(0.3, 2.0, 1.0, -1.0, 1.0, 1.0).unwrap();
        assert_eq!(band(&p), Band { low: -1.0, high: 1.0 });
        let p = ModelParams::new(1.0, 1.0, 2.0, -3.0, 4.0, 3.0).unwrap();
        assert_eq!(band(&p), Band { low: -1.0, high: 0.5 });
    }

    #[test]
    fn empty_band_rejected() {
        let err = ModelParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("a1/gamma1 < a0/gamma0"));
    }

    #[test]
    fn bad_rates_rejected() {
        assert!(ModelParams::new(1.0, 1.0, 1.0, -1.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(-1.0, 1.0, 1.0, -1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0, 1.0, -1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::INFINITY, -1.0, 1.0, 1.0).is_err());
        // pure deterministic flow is allowed
        assert!(ModelParams::new(0.0, 0.0, 1.0, -1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn pattern_examples() {
        let p = unit();
        assert_eq!(pattern(Regime::R0, 1.0, 3.7, &p), 1.0);
        assert_eq!(pattern(Regime::R1, 0.42, 0.0, &p), 0.42);
        assert!((pattern(Regime::R0, 3.0, 2f64.ln(), &p) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn t_star_examples() {
        let p = unit();
        assert_eq!(t_star(1.0, &p).unwrap(), 0.0);
        assert!((t_star(3.0, &p).unwrap() - 2f64.ln()).abs() < 1e-15);
        let q = ModelParams::new(1.0, 1.0, 2.0, -3.0, 4.0, 3.0).unwrap();
        let x = 2.0 * 0.5 - (-1.0);
        assert!((t_star(x, &q).unwrap() - 2f64.ln() / 3.0).abs() < 1e-15);
        assert!(t_star(0.9, &p).is_err());
    }

    #[test]
    fn band_coordinate_examples() {
        let p = unit();
        assert_eq!(band_coordinate(1.0, &p), 0.0);
        assert_eq!(band_coordinate(-1.0, &p), 1.0);
        assert_eq!(band_coordinate(2.0, &p), -0.5);
        assert_eq!(band_coordinate(3.0, &p), -1.0);
    }

    #[test]
    fn symmetric_reduction_examples() {
        let mk = |a0, a1| ModelParams::new(1.0, 1.0, a0, a1, 1.0, 1.0).unwrap();
        assert_eq!(symmetric_reduction(&mk(1.0, -1.0)), (0.0, 1.0));
        assert_eq!(symmetric_reduction(&mk(3.0, 1.0)), (2.0, 1.0));
        assert_eq!(symmetric_reduction(&mk(0.0, -4.0)), (-2.0, 2.0));
    }

    fn params_strategy() -> impl Strategy<Value = ModelParams> {
        (0.0..3.0f64, 0.0..3.0f64, -2.0..2.0f64, 0.1..3.0f64, 0.1..3.0f64, 0.1..3.0f64).prop_map(
            |(l0, l1, a0, spread, g0, g1)| {
                let a1 = (a0 / g0 - spread) * g1;
                ModelParams::new(l0, l1, a0, a1, g0, g1).unwrap()
            },
        )
    }

    fn regime_strategy() -> impl Strategy<Value = Regime> {
        prop_oneof![Just(Regime::R0), Just(Regime::R1)]
    }

    proptest! {
        #[test]
        fn semigroup(p in params_strategy(), r in regime_strategy(), x in -5.0..5.0f64,
                     s in 0.0..4.0f64, t in 0.0..4.0f64) {
            let two_step = pattern(r, pattern(r, x, s, &p), t, &p);
            let one_step = pattern(r, x, s + t, &p);
            prop_assert!((two_step - one_step).abs() <= 1e-12 * one_step.abs().max(1.0));
        }

        #[test]
        fn band_is_invariant(p in params_strategy(), r in regime_strategy(), u in 0.001..0.999f64,
                             t in 0.0..20.0f64) {
            let b = band(&p);
            let x = b.low + u * (b.high - b.low);
            let y = pattern(r, x, t, &p);
            prop_assert!(b.low <= y && y <= b.high);
        }

        #[test]
        fn monotone_approach(p in params_strategy(), r in regime_strategy(), x in -5.0..5.0f64,
                             s in 0.0..4.0f64, dt in 0.0..4.0f64) {
            let c = p.attractor(r);
            let d1 = (pattern(r, x, s, &p) - c).abs();
            let d2 = (pattern(r, x, s + dt, &p) - c).abs();
            prop_assert!(d2 <= d1 + 1e-15);
        }

        #[test]
        fn t_star_inverts_regime1_flow(p in params_strategy(), d in 0.0..10.0f64) {
            let level = p.attractor(Regime::R0);
            let x = level + d;
            let ts = t_star(x, &p).unwrap();
            prop_assert!(ts >= 0.0);
            let y = pattern(Regime::R1, x, ts, &p);
            prop_assert!((y - level).abs() <= 1e-12 * level.abs().max(p.band_width()));
        }
    }
}

//! Time `T(x)` for a path started above the band to drop below `a0/gamma0`.
//!
//! The Laplace transforms `E_i[exp(-q T(x))]` are Gauss hypergeometric
//! functions of the band coordinate `z(x) <= 0`:
//!
//! ```text
//! Q0(q, x) = λ0/(λ0+q) · F(b0, b1; β0+1; z)
//! Q1(q, x) =             F(b0, b1; β0;   z)
//! ```
//!
//! where `β_i(q) = (λ_i + q)/γ_i` and `b0 <= b1` are the roots of
//! `(n + β0)(n + β1) - β0(0) β1(0)` viewed as a polynomial in `-n`.

use crate::error::{Error, Result};
use crate::model::{band_coordinate, t_star, ModelParams, Regime};
use crate::specfun::{gauss_2f1_summed, sum_series, SeriesControl, Summed};

/// `β0(q)`, `β1(q)` and the two roots `b0(q) <= b1(q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperQuad {
    pub beta0: f64,
    pub beta1: f64,
    pub b0: f64,
    pub b1: f64,
}

/// Laplace-domain parameters at `q`. Defined for any real `q`; the
/// transforms use `q > 0`, small negative `q` is used for differentiation.
pub fn hyper_quad(q: f64, params: &ModelParams) -> HyperQuad {
    let (l0, l1, g0, g1) = (params.lambda0(), params.lambda1(), params.gamma0(), params.gamma1());
    let beta0 = (l0 + q) / g0;
    let beta1 = (l1 + q) / g1;
    let disc = (beta0 - beta1).powi(2) + 4.0 * (l0 / g0) * (l1 / g1);
    let b1 = 0.5 * (beta0 + beta1 + disc.sqrt());
    // product of the roots, written without cancellation
    let product = q * (l0 + l1 + q) / (g0 * g1);
    let b0 = if b1 != 0.0 { product / b1 } else { 0.5 * (beta0 + beta1 - disc.sqrt()) };
    HyperQuad { beta0, beta1, b0, b1 }
}

fn check_level(x: f64, params: &ModelParams) -> Result<()> {
    let level = params.attractor(Regime::R0);
    if !(x >= level) {
        return Err(Error::Domain(format!("x must exceed a0/gamma0 = {level}, got {x}")));
    }
    Ok(())
}

/// Transform without the `q > 0` guard.
fn transform(q: f64, x: f64, start: Regime, params: &ModelParams, ctl: &SeriesControl) -> Result<Summed> {
    let hq = hyper_quad(q, params);
    let z = band_coordinate(x, params);
    match start {
        Regime::R0 => {
            let l0 = params.lambda0();
            if l0 == 0.0 {
                return Ok(Summed { value: 0.0, terms: 0 });
            }
            let f = gauss_2f1_summed(hq.b0, hq.b1, hq.beta0 + 1.0, z, ctl)?;
            Ok(Summed {
                value: l0 / (l0 + q) * f.value,
                terms: f.terms,
            })
        }
        Regime::R1 => gauss_2f1_summed(hq.b0, hq.b1, hq.beta0, z, ctl),
    }
}

/// `E[exp(-q T(x)) | ε(0) = start]`, together with the number of
/// hypergeometric terms that were summed.
pub fn laplace_falling_summed(
    q: f64,
    x: f64,
    start: Regime,
    params: &ModelParams,
    ctl: &SeriesControl,
) -> Result<Summed> {
    if !(q > 0.0) {
        return Err(Error::Domain(format!("Laplace variable must be positive, got {q}")));
    }
    check_level(x, params)?;
    transform(q, x, start, params, ctl)
}

pub fn laplace_falling(q: f64, x: f64, start: Regime, params: &ModelParams, ctl: &SeriesControl) -> Result<f64> {
    laplace_falling_summed(q, x, start, params, ctl).map(|s| s.value)
}

/// Degenerate rate configurations with elementary transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialCase {
    /// Regime 0 never switches: from regime 0 the level is never reached,
    /// from regime 1 only if no switch happens before `t*(x)`.
    Lambda0Zero,
    /// Regime 1 never switches: from regime 1 the crossing happens at
    /// exactly `t*(x)`, from regime 0 after exactly one switch.
    Lambda1Zero,
}

pub fn laplace_falling_special(
    case: SpecialCase,
    q: f64,
    x: f64,
    start: Regime,
    params: &ModelParams,
    ctl: &SeriesControl,
) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::Domain(format!("Laplace variable must be positive, got {q}")));
    }
    check_level(x, params)?;
    let ts = t_star(x, params)?;
    match case {
        SpecialCase::Lambda0Zero => {
            if params.lambda0() != 0.0 {
                return Err(Error::Domain("lambda0 = 0 case requested with lambda0 != 0".into()));
            }
            Ok(match start {
                Regime::R0 => 0.0,
                Regime::R1 => (-(params.lambda1() + q) * ts).exp(),
            })
        }
        SpecialCase::Lambda1Zero => {
            if params.lambda1() != 0.0 {
                return Err(Error::Domain("lambda1 = 0 case requested with lambda1 != 0".into()));
            }
            match start {
                Regime::R1 => Ok((-q * ts).exp()),
                Regime::R0 => {
                    let l0 = params.lambda0();
                    let c = (l0 + q) / params.gamma0();
                    let z = band_coordinate(x, params);
                    let f = gauss_2f1_summed(q / params.gamma1(), c, 1.0 + c, z, ctl)?;
                    Ok(l0 / (l0 + q) * f.value)
                }
            }
        }
    }
}

/// How [`mean_falling`] obtained its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanMethod {
    /// Power series in the band coordinate (`|z| < 1`, or `|z| = 1` where it converges).
    Series,
    /// Richardson-extrapolated central difference of the continued transform at `q = 0`.
    FiniteDifference,
}

impl MeanMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MeanMethod::Series => "series",
            MeanMethod::FiniteDifference => "finite-difference",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFalling {
    pub value: f64,
    pub method: MeanMethod,
    pub terms: usize,
}

/// Derivative of the minor root at `q = 0`.
pub fn minor_root_slope(params: &ModelParams) -> f64 {
    let (l0, l1, g0, g1) = (params.lambda0(), params.lambda1(), params.gamma0(), params.gamma1());
    (l0 + l1) / (l0 * g1 + l1 * g0)
}

/// `E[T(x) | ε(0) = start]` from the power series in `z(x)`.
pub fn mean_falling_series(x: f64, start: Regime, params: &ModelParams, ctl: &SeriesControl) -> Result<Summed> {
    check_level(x, params)?;
    let (l0, l1, g0, g1) = (params.lambda0(), params.lambda1(), params.gamma0(), params.gamma1());
    if l0 == 0.0 {
        return Err(Error::Domain("mean falling time is infinite when lambda0 = 0".into()));
    }
    let z = band_coordinate(x, params);
    if z.abs() > 1.0 {
        return Err(Error::Convergence {
            what: "mean falling-time series (|z| > 1)",
            terms: 0,
        });
    }
    let c = l0 / g0 + l1 / g1;
    let (d, base) = match start {
        Regime::R0 => (1.0 + l0 / g0, 1.0 / l0),
        Regime::R1 => (l0 / g0, 0.0),
    };
    let slope = minor_root_slope(params);
    if z == 0.0 {
        return Ok(Summed { value: base, terms: 0 });
    }
    let mut ratio = 1.0;
    let s = sum_series("mean falling-time series", 0.0, ctl, |n| {
        let k = (n - 1) as f64;
        ratio *= (c + k) / (d + k) * z;
        ratio / n as f64
    })?;
    Ok(Summed {
        value: base - slope * s.value,
        terms: s.terms,
    })
}

/// `E[T(x) | ε(0) = start]` as `-dQ/dq` at zero, by central differences of
/// the Pfaff-continued transform with one Richardson step.
pub fn mean_falling_finite_difference(
    x: f64,
    start: Regime,
    params: &ModelParams,
    ctl: &SeriesControl,
) -> Result<Summed> {
    check_level(x, params)?;
    let l0 = params.lambda0();
    if l0 == 0.0 {
        return Err(Error::Domain("mean falling time is infinite when lambda0 = 0".into()));
    }
    let h = 1e-3 * l0.min(params.gamma0()).min(params.gamma1());
    let mut terms = 0;
    let mut slope = |step: f64| -> Result<f64> {
        let up = transform(step, x, start, params, ctl)?;
        let down = transform(-step, x, start, params, ctl)?;
        terms = terms.max(up.terms).max(down.terms);
        Ok((down.value - up.value) / (2.0 * step))
    };
    let coarse = slope(h)?;
    let fine = slope(0.5 * h)?;
    Ok(Summed {
        value: (4.0 * fine - coarse) / 3.0,
        terms,
    })
}

/// Mean falling time. Uses the series wherever it converges and falls back
/// to differentiating the continued transform elsewhere.
pub fn mean_falling(x: f64, start: Regime, params: &ModelParams, ctl: &SeriesControl) -> Result<MeanFalling> {
    check_level(x, params)?;
    if params.lambda0() == 0.0 {
        return Err(Error::Domain("mean falling time is infinite when lambda0 = 0".into()));
    }
    let z = band_coordinate(x, params);
    let ratio = params.lambda1() / params.gamma1();
    let series_ok = z.abs() < 1.0
        || (z == -1.0
            && match start {
                Regime::R1 => ratio < 1.0,
                Regime::R0 => ratio < 2.0,
            });
    if series_ok {
        match mean_falling_series(x, start, params, ctl) {
            Ok(s) => {
                return Ok(MeanFalling {
                    value: s.value,
                    method: MeanMethod::Series,
                    terms: s.terms,
                })
            }
            Err(Error::Convergence { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let s = mean_falling_finite_difference(x, start, params, ctl)?;
    Ok(MeanFalling {
        value: s.value,
        method: MeanMethod::FiniteDifference,
        terms: s.terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::band;
    use proptest::prelude::*;

    fn ctl() -> SeriesControl {
        SeriesControl::default()
    }

    fn unit() -> ModelParams {
        ModelParams::symmetric(1.0, 1.0, 1.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn hyper_quad_examples() {
        let p = ModelParams::new(0.7, 1.9, 1.0, -1.0, 1.3, 0.4).unwrap();
        let hq = hyper_quad(0.0, &p);
        assert_eq!(hq.b0, 0.0);
        assert!(rel(hq.b1, 0.7 / 1.3 + 1.9 / 0.4) < 1e-15);

        let hq = hyper_quad(1.0, &unit());
        assert_eq!((hq.beta0, hq.beta1, hq.b0, hq.b1), (2.0, 2.0, 1.0, 3.0));

        let p = ModelParams::new(0.0, 1.5, 1.0, -1.0, 2.0, 0.5).unwrap();
        let hq = hyper_quad(0.8, &p);
        assert!(rel(hq.b0, 0.8 / 2.0) < 1e-15);
        assert!(rel(hq.b1, (1.5 + 0.8) / 0.5) < 1e-15);
    }

    #[test]
    fn hyper_quad_root_identities() {
        let p = ModelParams::new(0.7, 1.9, 1.0, -1.0, 1.3, 0.4).unwrap();
        for k in -8..=4 {
            let q = 10f64.powi(k);
            let hq = hyper_quad(q, &p);
            let sum = hq.beta0 + hq.beta1;
            let prod = q * (0.7 + 1.9 + q) / (1.3 * 0.4);
            assert!(rel(hq.b0 + hq.b1, sum) < 1e-12);
            assert!(rel(hq.b0 * hq.b1, prod) < 1e-12, "q={q}");
            // b0 is a root of n^2 - sum n + prod, to working precision
            let resid = hq.b0 * hq.b0 - sum * hq.b0 + prod;
            assert!(resid.abs() <= 1e-14 * sum * hq.b0, "q={q}: {resid}");
            assert!(hq.b0 <= hq.b1);
        }
    }

    #[test]
    fn boundary_values() {
        let p = unit();
        for &q in &[0.1, 1.0, 10.0] {
            let x = 1.0 + 1e-12;
            assert!((laplace_falling(q, x, Regime::R0, &p, &ctl()).unwrap() - 1.0 / (1.0 + q)).abs() < 1e-10);
            assert!((laplace_falling(q, x, Regime::R1, &p, &ctl()).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn lambda1_zero_regime1_is_power_law() {
        let p = ModelParams::new(1.3, 0.0, 1.0, -2.0, 1.0, 0.7).unwrap();
        let b = band(&p);
        for &x in &[1.5, 3.0, 12.0] {
            let q = 0.6;
            let expect = ((x - b.low) / (b.high - b.low)).powf(-q / 0.7);
            assert!(rel(laplace_falling(q, x, Regime::R1, &p, &ctl()).unwrap(), expect) < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = unit();
        assert!(laplace_falling(0.0, 2.0, Regime::R0, &p, &ctl()).is_err());
        assert!(laplace_falling(1.0, 0.5, Regime::R0, &p, &ctl()).is_err());
        assert!(laplace_falling_special(SpecialCase::Lambda0Zero, 1.0, 2.0, Regime::R0, &p, &ctl()).is_err());
        assert!(mean_falling(0.5, Regime::R1, &p, &ctl()).is_err());
        let p0 = ModelParams::new(0.0, 1.0, 1.0, -1.0, 1.0, 1.0).unwrap();
        assert!(matches!(mean_falling(2.0, Regime::R0, &p0, &ctl()), Err(Error::Domain(_))));
    }

    #[test]
    fn lambda0_zero_closed_forms() {
        let p = ModelParams::new(0.0, 0.9, 1.0, -1.0, 1.0, 2.0).unwrap();
        for &x in &[1.2, 2.0, 5.0] {
            assert_eq!(laplace_falling_special(SpecialCase::Lambda0Zero, 0.5, x, Regime::R0, &p, &ctl()).unwrap(), 0.0);
            let general = laplace_falling(0.5, x, Regime::R1, &p, &ctl()).unwrap();
            let special = laplace_falling_special(SpecialCase::Lambda0Zero, 0.5, x, Regime::R1, &p, &ctl()).unwrap();
            assert!(rel(general, special) < 1e-10);
            assert_eq!(laplace_falling(0.5, x, Regime::R0, &p, &ctl()).unwrap(), 0.0);
        }
        let at_level = laplace_falling_special(SpecialCase::Lambda0Zero, 0.5, 1.0, Regime::R1, &p, &ctl()).unwrap();
        assert_eq!(at_level, 1.0);
    }

    #[test]
    fn lambda1_zero_general_matches_integral_form() {
        let p = ModelParams::new(1.1, 0.0, 1.0, -1.0, 0.8, 1.4).unwrap();
        for &q in &[0.05, 0.5, 3.0] {
            for &x in &[1.3, 2.0, 8.0] {
                let general = laplace_falling(q, x, Regime::R0, &p, &ctl()).unwrap();
                let special = laplace_falling_special(SpecialCase::Lambda1Zero, q, x, Regime::R0, &p, &ctl()).unwrap();
                assert!(rel(general, special) < 1e-10, "{general} vs {special}");
            }
        }
    }

    #[test]
    fn mean_series_examples() {
        let p = unit();
        assert!((minor_root_slope(&p) - 1.0).abs() < 1e-15);
        let m0 = mean_falling(1.0, Regime::R0, &p, &ctl()).unwrap();
        let m1 = mean_falling(1.0, Regime::R1, &p, &ctl()).unwrap();
        assert_eq!((m0.value, m1.value), (1.0, 0.0));
    }

    /// Reference values: −∂/∂q of the hypergeometric transforms at q = 0,
    /// computed with 30-digit arbitrary precision outside this crate.
    const MEAN_REFERENCE: [(f64, f64, f64); 5] = [
        (1.2, 1.095_310_179_804_324_9, 0.186_219_270_713_415_77),
        (1.5, 1.223_143_551_314_209_8, 0.423_143_551_314_209_76),
        (2.0, 1.405_465_108_108_164_4, 0.738_798_441_441_497_7),
        (2.5, 1.559_615_787_935_422_7, 0.988_187_216_506_851_3),
        (10.0, 2.704_748_092_238_425_2, 2.522_929_910_420_243_4),
    ];

    #[test]
    fn mean_matches_high_precision_reference() {
        let p = unit();
        for &(x, e0, e1) in &MEAN_REFERENCE {
            let m0 = mean_falling(x, Regime::R0, &p, &ctl()).unwrap();
            let m1 = mean_falling(x, Regime::R1, &p, &ctl()).unwrap();
            assert!(rel(m0.value, e0) < 1e-8, "x={x}: {} vs {e0}", m0.value);
            assert!(rel(m1.value, e1) < 1e-8, "x={x}: {} vs {e1}", m1.value);
            let expected = if x < 3.0 { MeanMethod::Series } else { MeanMethod::FiniteDifference };
            assert_eq!(m0.method, expected);
        }
    }

    #[test]
    fn series_and_finite_difference_agree() {
        let sets = [
            ModelParams::symmetric(1.0, 1.0, 1.0).unwrap(),
            ModelParams::new(0.6, 1.7, 2.0, -1.0, 1.5, 0.8).unwrap(),
            ModelParams::new(2.2, 0.3, 0.5, -3.0, 0.7, 2.5).unwrap(),
        ];
        for p in &sets {
            let b = band(p);
            for &u in &[0.1, 0.4, 0.8] {
                let x = b.high + u * (b.high - b.low);
                for r in Regime::BOTH {
                    let s = mean_falling_series(x, r, p, &ctl()).unwrap().value;
                    let fd = mean_falling_finite_difference(x, r, p, &ctl()).unwrap().value;
                    assert!(rel(fd, s) < 1e-5, "{p:?} x={x} {r:?}: {s} vs {fd}");
                }
            }
        }
    }

    #[test]
    fn ode_residual() {
        // (x - a0/γ0) Q0' = -β0(q) Q0 + β0(0) Q1,  (x - a1/γ1) Q1' = β1(0) Q0 - β1(q) Q1
        let sets = [unit(), ModelParams::new(0.6, 1.7, 2.0, -1.0, 1.5, 0.8).unwrap()];
        for p in &sets {
            let b = band(p);
            for &q in &[0.3, 1.0, 4.0] {
                let hq = hyper_quad(q, p);
                let hq0 = hyper_quad(0.0, p);
                for k in 1..10 {
                    let x = b.high + 0.1 * k as f64 * (b.high - b.low);
                    let h = 1e-4 * (b.high - b.low);
                    let q0 = |x| laplace_falling(q, x, Regime::R0, p, &ctl()).unwrap();
                    let q1 = |x| laplace_falling(q, x, Regime::R1, p, &ctl()).unwrap();
                    let d0 = (q0(x + h) - q0(x - h)) / (2.0 * h);
                    let d1 = (q1(x + h) - q1(x - h)) / (2.0 * h);
                    let r0 = (x - b.high) * d0 + hq.beta0 * q0(x) - hq0.beta0 * q1(x);
                    let r1 = (x - b.low) * d1 - hq0.beta1 * q0(x) + hq.beta1 * q1(x);
                    assert!(r0.abs() < 1e-6 && r1.abs() < 1e-6, "x={x} q={q}: {r0} {r1}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn transform_is_monotone_in_q(u in 0.01..3.0f64, l0 in 0.1..3.0f64, l1 in 0.0..3.0f64) {
            let p = ModelParams::new(l0, l1, 1.0, -1.0, 1.0, 1.0).unwrap();
            let x = 1.0 + 2.0 * u;
            for r in Regime::BOTH {
                let mut prev = 1.0;
                for k in 1..=100 {
                    let q = 0.1 * k as f64;
                    let v = laplace_falling(q, x, r, &p, &ctl()).unwrap();
                    prop_assert!((0.0..=1.0).contains(&v));
                    prop_assert!(v <= prev + 1e-14);
                    prev = v;
                }
            }
        }

        #[test]
        fn almost_surely_finite(u in 0.0..5.0f64, l0 in 0.1..3.0f64, l1 in 0.0..3.0f64) {
            let p = ModelParams::new(l0, l1, 1.0, -1.0, 1.0, 1.0).unwrap();
            let x = 1.0 + 2.0 * u;
            for r in Regime::BOTH {
                let v = laplace_falling(1e-8, x, r, &p, &ctl()).unwrap();
                prop_assert!((v - 1.0).abs() < 1e-6, "{}", v);
            }
        }
    }
}

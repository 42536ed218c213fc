//! Exact simulation of the switching process. Holding times are exponential
//! and the value between switches follows the closed-form flow, so nothing
//! here depends on a time step.

mod mc;

pub use mc::{
    chunk_rng, estimate, estimate_many, histogram, ks_critical_value, ks_two_sample, sample_moments, AtomEstimate,
    BinEstimate, EstimateWithCI, Histogram, MCConfig, SampleMoments, SimRng,
};

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::model::{pattern, t_star, ModelParams, Regime};

/// Default cap on switches per falling-time replicate.
pub const DEFAULT_MAX_SWITCHES: u64 = 10_000_000;

/// One regime change along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Switch {
    pub epoch: f64,
    /// Regime entered at `epoch`.
    pub regime: Regime,
    /// Value of the process at `epoch`.
    pub x: f64,
}

/// A simulated trajectory on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub start_regime: Regime,
    pub x0: f64,
    pub switches: Vec<Switch>,
    pub horizon: f64,
}

/// Value, regime and switch count of a path at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub x: f64,
    pub regime: Regime,
    pub switches: usize,
}

fn holding_time<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    if rate > 0.0 {
        let e: f64 = Exp1.sample(rng);
        e / rate
    } else {
        f64::INFINITY
    }
}

fn check_horizon(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// Samples a path started at `x0` in regime `start`.
pub fn sample_path<R: Rng + ?Sized>(
    params: &ModelParams,
    x0: f64,
    start: Regime,
    horizon: f64,
    rng: &mut R,
) -> Result<Path> {
    check_horizon(horizon)?;
    let mut switches = Vec::new();
    let (mut now, mut x, mut regime) = (0.0, x0, start);
    loop {
        let hold = holding_time(params.lambda(regime), rng);
        if hold >= horizon - now {
            break;
        }
        x = pattern(regime, x, hold, params);
        now += hold;
        regime = regime.flip();
        switches.push(Switch { epoch: now, regime, x });
    }
    Ok(Path {
        start_regime: start,
        x0,
        switches,
        horizon,
    })
}

impl Path {
    /// Index of the segment active at `t` (0 is the segment before any switch).
    fn segment(&self, t: f64) -> usize {
        self.switches.partition_point(|s| s.epoch <= t)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, {}]", self.horizon)));
        }
        Ok(())
    }
}

/// Evaluates a path at `t <= horizon`.
pub fn eval_path(path: &Path, t: f64, params: &ModelParams) -> Result<PathPoint> {
    path.check_time(t)?;
    let k = path.segment(t);
    let (epoch, regime, x) = match k {
        0 => (0.0, path.start_regime, path.x0),
        _ => {
            let s = path.switches[k - 1];
            (s.epoch, s.regime, s.x)
        }
    };
    Ok(PathPoint {
        x: pattern(regime, x, t - epoch, params),
        regime,
        switches: k,
    })
}

/// `(T(t), Γ(t))`: the integrals of `a_ε` and `γ_ε` along the path up to `t`.
pub fn telegraph_values(path: &Path, t: f64, params: &ModelParams) -> Result<(f64, f64)> {
    path.check_time(t)?;
    let (mut tele, mut gamma) = (0.0, 0.0);
    let (mut from, mut regime) = (0.0, path.start_regime);
    for s in path.switches.iter().take(path.segment(t)) {
        let len = s.epoch - from;
        tele += params.velocity(regime) * len;
        gamma += params.gamma(regime) * len;
        from = s.epoch;
        regime = s.regime;
    }
    let len = t - from;
    Ok((tele + params.velocity(regime) * len, gamma + params.gamma(regime) * len))
}

/// State of a path at a single time, with running integrals. Produced by
/// [`sample_state`] without storing the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub x: f64,
    pub regime: Regime,
    pub switches: u64,
    /// `T(t) = ∫ a_ε ds`.
    pub telegraph: f64,
    /// `Γ(t) = ∫ γ_ε ds`.
    pub gamma: f64,
}

impl State {
    pub fn new(x: f64, regime: Regime) -> Self {
        State {
            x,
            regime,
            switches: 0,
            telegraph: 0.0,
            gamma: 0.0,
        }
    }

    fn flow(&mut self, h: f64, params: &ModelParams) {
        let c = params.attractor(self.regime);
        let g = params.gamma(self.regime);
        self.x = c + (self.x - c) * (-g * h).exp();
        self.telegraph += params.velocity(self.regime) * h;
        self.gamma += g * h;
    }
}

/// Runs `state` forward by `dt`. By memorylessness of the holding times
/// this may be called repeatedly to observe one path at increasing times.
pub fn advance<R: Rng + ?Sized>(state: &mut State, dt: f64, params: &ModelParams, rng: &mut R) {
    let mut remaining = dt;
    loop {
        let hold = holding_time(params.lambda(state.regime), rng);
        if hold >= remaining {
            state.flow(remaining, params);
            return;
        }
        state.flow(hold, params);
        state.regime = state.regime.flip();
        state.switches += 1;
        remaining -= hold;
    }
}

/// Samples the state at time `t` of a path started at `(x0, start)`.
pub fn sample_state<R: Rng + ?Sized>(
    params: &ModelParams,
    x0: f64,
    start: Regime,
    t: f64,
    rng: &mut R,
) -> Result<State> {
    check_horizon(t)?;
    let mut state = State::new(x0, start);
    advance(&mut state, t, params, rng);
    Ok(state)
}

/// Samples the first time a path started at `x >= a0/γ0` drops below
/// `a0/γ0`. Only regime-1 segments can cross, at `t*(v)` after entering at
/// value `v`, provided no switch comes first.
///
/// Returns `f64::INFINITY` when the path reaches regime 0 and `λ0 = 0`.
pub fn sample_falling_time<R: Rng + ?Sized>(
    params: &ModelParams,
    x: f64,
    start: Regime,
    rng: &mut R,
    max_switches: u64,
) -> Result<f64> {
    t_star(x, params)?;
    if start == Regime::R0 && params.lambda0() == 0.0 {
        return Err(Error::Domain("falling time is infinite from regime 0 when lambda0 = 0".into()));
    }
    let (mut elapsed, mut v, mut regime) = (0.0, x, start);
    for _ in 0..=max_switches {
        let hold = holding_time(params.lambda(regime), rng);
        if regime == Regime::R1 {
            let cross = t_star(v, params)?;
            if cross <= hold {
                return Ok(elapsed + cross);
            }
        } else if hold.is_infinite() {
            return Ok(f64::INFINITY);
        }
        v = pattern(regime, v, hold, params);
        elapsed += hold;
        regime = regime.flip();
    }
    Err(Error::MaxSwitches(max_switches))
}

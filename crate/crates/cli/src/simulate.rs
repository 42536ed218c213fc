//! `simulate`: raw paths, falling times or a histogram of one functional.

use std::io::Write;

use rayon::prelude::*;

use oubv::model::{pattern, t_star};
use oubv::simulate::{
    chunk_rng, histogram, sample_falling_time, sample_path, sample_state, MCConfig, Path, SimRng,
    DEFAULT_MAX_SWITCHES,
};
use oubv::{ModelParams, Regime};

use crate::config::RunConfig;
use crate::{model_params, num, regime, CliError};

pub const PATHS_HEADER: [&str; 4] = ["replicate", "epoch", "regime", "x"];
pub const FALLING_HEADER: [&str; 2] = ["replicate", "T"];
pub const HISTOGRAM_HEADER: [&str; 5] = ["kind", "lo", "hi", "mass", "stderr"];

fn mc_config(cfg: &RunConfig) -> Result<MCConfig, CliError> {
    Ok(MCConfig::new(cfg.mc.replicates, cfg.mc.seed)?.with_chunk(cfg.mc.chunk)?)
}

/// Runs `f` once per replicate with the chunked streams and returns the
/// results in replicate order, whatever the thread count.
fn per_replicate<T: Send>(
    mc: &MCConfig,
    f: impl Fn(&mut SimRng) -> oubv::Result<T> + Sync,
) -> oubv::Result<Vec<T>> {
    let chunks = mc.replicates.div_ceil(mc.chunk);
    let parts: Vec<oubv::Result<Vec<T>>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(mc.seed, k);
            let len = mc.chunk.min(mc.replicates - k * mc.chunk);
            (0..len).map(|_| f(&mut rng)).collect()
        })
        .collect();
    let mut all = Vec::with_capacity(mc.replicates as usize);
    for part in parts {
        all.extend(part?);
    }
    Ok(all)
}

fn paths(cfg: &RunConfig, p: &ModelParams, start: Regime, w: &mut csv::Writer<&mut dyn Write>) -> Result<(), CliError> {
    let mc = mc_config(cfg)?;
    let e = &cfg.eval;
    let all: Vec<Path> = per_replicate(&mc, |rng| sample_path(p, e.x, start, e.horizon, rng))?;
    w.write_record(PATHS_HEADER)?;
    for (r, path) in all.iter().enumerate() {
        let r = r.to_string();
        w.write_record([r.clone(), num(0.0), path.start_regime.index().to_string(), num(path.x0)])?;
        for s in &path.switches {
            w.write_record([r.clone(), num(s.epoch), s.regime.index().to_string(), num(s.x)])?;
        }
        let end = oubv::simulate::eval_path(path, path.horizon, p)?;
        w.write_record([r, num(path.horizon), end.regime.index().to_string(), num(end.x)])?;
    }
    Ok(())
}

fn falling_times(
    cfg: &RunConfig,
    p: &ModelParams,
    start: Regime,
    w: &mut csv::Writer<&mut dyn Write>,
) -> Result<(), CliError> {
    let mc = mc_config(cfg)?;
    let cap = cfg.max_switches.unwrap_or(DEFAULT_MAX_SWITCHES);
    t_star(cfg.eval.x, p)?;
    let all = per_replicate(&mc, |rng| sample_falling_time(p, cfg.eval.x, start, rng, cap))?;
    w.write_record(FALLING_HEADER)?;
    for (r, t) in all.iter().enumerate() {
        w.write_record([r.to_string(), num(*t)])?;
    }
    Ok(())
}

fn hist(cfg: &RunConfig, p: &ModelParams, start: Regime, w: &mut csv::Writer<&mut dyn Write>) -> Result<(), CliError> {
    let mc = mc_config(cfg)?;
    let e = &cfg.eval;
    let functional = cfg.functional.as_deref().unwrap_or("x");
    let h = match functional {
        "x" => {
            let a = pattern(Regime::R1, e.x, e.t, p);
            let b = pattern(Regime::R0, e.x, e.t, p);
            let range = cfg.range.map_or((a.min(b), a.max(b)), |[lo, hi]| (lo, hi));
            let atom = pattern(start, e.x, e.t, p);
            histogram(&mc, e.bins, range, &[atom], |rng| {
                Ok(Some(sample_state(p, e.x, start, e.t, rng)?.x))
            })?
        }
        "telegraph" => {
            let (a, b) = (p.a1() * e.t, p.a0() * e.t);
            let range = cfg.range.map_or((a.min(b), a.max(b)), |[lo, hi]| (lo, hi));
            let atom = p.velocity(start) * e.t;
            histogram(&mc, e.bins, range, &[atom], |rng| {
                Ok(Some(sample_state(p, e.x, start, e.t, rng)?.telegraph))
            })?
        }
        "falling-time" => {
            let floor = t_star(e.x, p)?;
            let cap = cfg.max_switches.unwrap_or(DEFAULT_MAX_SWITCHES);
            let spread = 10.0 * (p.lambda0().recip().min(1e6) + p.lambda1().recip().min(1e6)).max(1.0);
            let range = cfg.range.map_or((floor, floor + spread), |[lo, hi]| (lo, hi));
            // from regime 1 the no-switch crossing happens at exactly t*(x)
            let atoms = if start == Regime::R1 { vec![floor] } else { Vec::new() };
            histogram(&mc, e.bins, range, &atoms, |rng| {
                let t = sample_falling_time(p, e.x, start, rng, cap)?;
                Ok(t.is_finite().then_some(t))
            })?
        }
        other => {
            return Err(CliError::Config(format!(
                "functional must be x, telegraph or falling-time, got '{other}'"
            )))
        }
    };
    w.write_record(HISTOGRAM_HEADER)?;
    for a in &h.atoms {
        w.write_record(["atom".to_string(), num(a.location), num(a.location), num(a.mass), num(a.std_error)])?;
    }
    for b in &h.bins {
        w.write_record(["bin".to_string(), num(b.lo), num(b.hi), num(b.mass), num(b.std_error)])?;
    }
    Ok(())
}

pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let p = model_params(cfg)?;
    let start = regime(cfg.eval.start, "start")?;
    let mut w = csv::Writer::from_writer(out);
    match cfg.target.as_deref().unwrap_or("paths") {
        "paths" => paths(cfg, &p, start, &mut w)?,
        "falling-time" => falling_times(cfg, &p, start, &mut w)?,
        "histogram" => hist(cfg, &p, start, &mut w)?,
        other => {
            return Err(CliError::Config(format!(
                "target must be paths, falling-time or histogram, got '{other}'"
            )))
        }
    }
    w.flush()?;
    Ok(())
}

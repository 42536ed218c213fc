//! `validate`: runs the analytic-versus-Monte-Carlo suite.

use std::io::Write;

use oubv::harness::{standard_suite, Tier};

use crate::config::RunConfig;
use crate::{num, CliError};

pub const HEADER: [&str; 7] = ["name", "analytic", "mc", "stderr", "z", "passed", "seed"];

pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let tier = match cfg.tier.as_deref().unwrap_or("quick") {
        "quick" => Tier::Quick,
        "full" => Tier::Full,
        other => return Err(CliError::Config(format!("tier must be quick or full, got '{other}'"))),
    };
    let reports = standard_suite(tier, cfg.mc.seed, cfg.only.as_deref());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in &reports {
        w.write_record([
            r.name.clone(),
            num(r.analytic_value),
            num(r.mc_estimate.value),
            num(r.mc_estimate.std_error),
            num(r.z_score),
            r.passed.to_string(),
            r.mc_estimate.seed.to_string(),
        ])?;
        if let Some(e) = &r.error {
            eprintln!("{}: {e}", r.name);
        }
    }
    w.flush()?;
    let passed = reports.iter().filter(|r| r.passed).count();
    eprintln!("{passed}/{}", reports.len());
    if passed == reports.len() {
        Ok(())
    } else {
        Err(CliError::Validation {
            passed,
            total: reports.len(),
        })
    }
}

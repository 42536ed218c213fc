//! `oubv` command-line front end.
//!
//! ```text
//! oubv simulate --target paths|falling-time|histogram [options]
//! oubv analytic --quantity NAME [options]
//! oubv validate --tier quick|full [--only FILTER] [--seed N]
//! ```
//!
//! Options are `--key value` pairs; see the README for the keys.

mod analytic;
mod config;
mod simulate;
mod validate;

use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use oubv::{Error, ModelParams, Regime};

use config::{parse_args, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    Convergence(String),
    #[error("{passed}/{total} checks passed")]
    Validation { passed: usize, total: usize },
    #[error("output error: {0}")]
    Io(#[from] io::Error),
    #[error("output error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) | CliError::Csv(_) => 3,
            CliError::Convergence(_) => 4,
            CliError::Validation { .. } => 5,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_) | Error::Domain(_) | Error::NotSymmetric(_) => CliError::Config(e.to_string()),
            Error::Convergence { .. } | Error::Quadrature { .. } => CliError::Convergence(e.to_string()),
            Error::MaxSwitches(_) => CliError::Runtime(e.to_string()),
        }
    }
}

pub fn model_params(cfg: &RunConfig) -> Result<ModelParams, CliError> {
    let m = &cfg.model;
    Ok(ModelParams::new(m.lambda0, m.lambda1, m.a0, m.a1, m.gamma0, m.gamma1)?)
}

pub fn regime(index: u8, key: &str) -> Result<Regime, CliError> {
    Regime::from_index(usize::from(index)).ok_or_else(|| CliError::Config(format!("{key} must be 0 or 1, got {index}")))
}

/// Full-precision decimal: 17 significant digits round-trip every `f64`.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn output(out: &Option<std::path::PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(io::BufWriter::new(File::create(path)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var("OUBV_THREADS") {
        let n: usize = raw
            .parse()
            .map_err(|_| CliError::Config(format!("OUBV_THREADS must be a positive integer, got '{raw}'")))?;
        if n == 0 {
            return Err(CliError::Config("OUBV_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn run(args: &[String]) -> Result<(), CliError> {
    configure_threads()?;
    let inv = parse_args(args)?;
    let mut sink = output(&inv.out)?;
    let result = match inv.command.as_str() {
        "simulate" => simulate::run(&inv.config, &mut sink),
        "analytic" => analytic::run(&inv.config, &mut sink),
        "validate" => validate::run(&inv.config, &mut sink),
        other => Err(CliError::Config(format!("unknown subcommand '{other}'"))),
    };
    sink.flush()?;
    result
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // the validation summary line has already been printed
            if !matches!(e, CliError::Validation { .. }) {
                eprintln!("oubv: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

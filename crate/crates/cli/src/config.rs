//! Run configuration: an optional JSON file plus `--key value` overrides.
//!
//! A dotted key (`--model.lambda0 2`) addresses a path in the JSON tree. A
//! bare key is looked up in the `model`, `mc` and `eval` sections, and
//! otherwise names a top-level option.

use std::path::PathBuf;

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::CliError;

const MODEL_KEYS: [&str; 6] = ["lambda0", "lambda1", "a0", "a1", "gamma0", "gamma1"];
const MC_KEYS: [&str; 3] = ["replicates", "seed", "chunk"];
const EVAL_KEYS: [&str; 15] = [
    "t", "s", "x", "q", "z", "n", "start", "end", "y", "order", "sigma", "case", "grid", "horizon", "bins",
];

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub lambda0: f64,
    pub lambda1: f64,
    pub a0: f64,
    pub a1: f64,
    pub gamma0: f64,
    pub gamma1: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            lambda0: 1.0,
            lambda1: 1.0,
            a0: 1.0,
            a1: -1.0,
            gamma0: 1.0,
            gamma1: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub replicates: u64,
    pub seed: u64,
    pub chunk: u64,
}

impl Default for McSection {
    fn default() -> Self {
        McSection {
            replicates: 10_000,
            seed: 42,
            chunk: 10_000,
        }
    }
}

/// One grid axis: `{"x": [1.2, 1.5]}` or the string `"x=1.2,1.5"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Table(Map<String, Value>),
    Spec(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub t: f64,
    pub s: f64,
    pub x: f64,
    pub q: f64,
    pub z: f64,
    pub n: u32,
    pub start: u8,
    pub end: u8,
    pub y: f64,
    pub order: u8,
    pub sigma: f64,
    pub case: Option<String>,
    pub grid: Option<Grid>,
    pub horizon: f64,
    pub bins: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            t: 1.0,
            s: 0.5,
            x: 0.0,
            q: 1.0,
            z: 0.0,
            n: 0,
            start: 0,
            end: 0,
            y: 0.0,
            order: 1,
            sigma: 1.0,
            case: None,
            grid: None,
            horizon: 1.0,
            bins: 20,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub mc: McSection,
    pub eval: EvalSection,
    pub target: Option<String>,
    pub quantity: Option<String>,
    pub tier: Option<String>,
    pub only: Option<String>,
    pub range: Option<[f64; 2]>,
    pub max_switches: Option<u64>,
    pub functional: Option<String>,
}

/// Parsed command line: subcommand, config and output path.
#[derive(Debug)]
pub struct Invocation {
    pub command: String,
    pub config: RunConfig,
    pub out: Option<PathBuf>,
}

fn parse_scalar(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

fn resolve(key: &str) -> Vec<String> {
    if key.contains('.') {
        return key.split('.').map(str::to_string).collect();
    }
    let section = if MODEL_KEYS.contains(&key) {
        Some("model")
    } else if MC_KEYS.contains(&key) {
        Some("mc")
    } else if EVAL_KEYS.contains(&key) {
        Some("eval")
    } else {
        None
    };
    match section {
        Some(s) => vec![s.to_string(), key.to_string()],
        None => vec![key.to_string()],
    }
}

fn set_path(tree: &mut Value, path: &[String], value: Value) -> Result<(), CliError> {
    let mut node = tree;
    for (k, part) in path.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("cannot set '{}': parent is not an object", path.join("."))))?;
        if k + 1 == path.len() {
            obj.insert(part.clone(), value);
            return Ok(());
        }
        node = obj.entry(part.clone()).or_insert_with(|| Value::Object(Map::new()));
    }
    Ok(())
}

/// Parses `<command> [--key value]...`.
pub fn parse_args(args: &[String]) -> Result<Invocation, CliError> {
    let (command, rest) = args
        .split_first()
        .ok_or_else(|| CliError::Config("missing subcommand (simulate, analytic or validate)".into()))?;
    let mut tree = Value::Object(Map::new());
    let mut overrides = Vec::new();
    let mut out = None;
    let mut iter = rest.iter();
    while let Some(flag) = iter.next() {
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| CliError::Config(format!("expected --key, got '{flag}'")))?;
        let value = iter
            .next()
            .ok_or_else(|| CliError::Config(format!("missing value for --{key}")))?;
        match key {
            "config" => {
                let text = std::fs::read_to_string(value)
                    .map_err(|e| CliError::Config(format!("cannot read config '{value}': {e}")))?;
                tree = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad config '{value}': {e}")))?;
            }
            "out" => out = Some(PathBuf::from(value)),
            _ => overrides.push((resolve(key), parse_scalar(value))),
        }
    }
    for (path, value) in overrides {
        set_path(&mut tree, &path, value)?;
    }
    let config: RunConfig = serde_json::from_value(tree).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))?;
    Ok(Invocation {
        command: command.clone(),
        config,
        out,
    })
}

impl EvalSection {
    /// Grid points as `(axis, values)`; the single point of the section
    /// itself when no grid is configured.
    pub fn grid_axis(&self) -> Result<Option<(String, Vec<f64>)>, CliError> {
        let Some(grid) = &self.grid else {
            return Ok(None);
        };
        let (axis, values) = match grid {
            Grid::Table(map) => {
                if map.len() != 1 {
                    return Err(CliError::Config("grid must name exactly one variable".into()));
                }
                let (k, v) = map.iter().next().expect("one entry");
                let values = v
                    .as_array()
                    .ok_or_else(|| CliError::Config("grid values must be a list".into()))?
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| CliError::Config(format!("grid value {x} is not a number"))))
                    .collect::<Result<Vec<_>, _>>()?;
                (k.clone(), values)
            }
            Grid::Spec(spec) => {
                let (k, list) = spec
                    .split_once('=')
                    .ok_or_else(|| CliError::Config(format!("grid '{spec}' is not of the form var=v1,v2,...")))?;
                let values = list
                    .split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad grid value '{v}'"))))
                    .collect::<Result<Vec<_>, _>>()?;
                (k.trim().to_string(), values)
            }
        };
        if values.is_empty() {
            return Err(CliError::Config("grid is empty".into()));
        }
        if !["t", "s", "x", "q", "z", "y"].contains(&axis.as_str()) {
            return Err(CliError::Config(format!("grid axis must be one of t, s, x, q, z, y (got '{axis}')")));
        }
        Ok(Some((axis, values)))
    }

    /// Copy of the section with `axis` set to `value`.
    pub fn with(&self, axis: &str, value: f64) -> EvalSection {
        let mut e = self.clone();
        match axis {
            "t" => e.t = value,
            "s" => e.s = value,
            "x" => e.x = value,
            "q" => e.q = value,
            "z" => e.z = value,
            _ => e.y = value,
        }
        e
    }
}

//! `analytic`: evaluates one closed-form quantity over a grid.

use std::io::Write;

use oubv::analytic::{
    hyper_quad, joint_density, kac_limit_reference, laplace_falling_special, laplace_falling_summed, mean_falling,
    mean_x, mean_x_symmetric, mgf_gamma, mgf_restricted, occupation_probs, tau_cross, telegraph_cov,
    telegraph_density, telegraph_moment_summed, var_x_symmetric, MomentOrder, SpecialCase, TauBranch,
};
use oubv::quadrature::QuadControl;
use oubv::{Error, ModelParams, Regime, SeriesControl};

use crate::config::{EvalSection, RunConfig};
use crate::{model_params, num, regime, CliError};

pub const HEADER: [&str; 11] = ["quantity", "start", "t", "s", "x", "q", "n", "value", "method", "terms", "error"];

/// Quantity names accepted by `--quantity`.
pub const QUANTITIES: [&str; 17] = [
    "hyper-quad",
    "laplace-falling",
    "laplace-falling-special",
    "mean-falling",
    "occupation-probs",
    "mgf-gamma",
    "mean-x",
    "mean-x-symmetric",
    "var-x-symmetric",
    "kac-limit-reference",
    "tau-cross",
    "joint-density",
    "telegraph-density",
    "telegraph-atom",
    "telegraph-moment",
    "telegraph-cov",
    "mgf-restricted",
];

/// One computed value: label suffix, value, method and series terms.
struct Value {
    label: Option<&'static str>,
    value: f64,
    method: &'static str,
    terms: Option<usize>,
}

fn single(value: f64, method: &'static str) -> Vec<Value> {
    vec![Value {
        label: None,
        value,
        method,
        terms: None,
    }]
}

fn order(e: &EvalSection) -> Result<MomentOrder, CliError> {
    match e.order {
        1 => Ok(MomentOrder::First),
        2 => Ok(MomentOrder::Second),
        k => Err(CliError::Config(format!("order must be 1 or 2, got {k}"))),
    }
}

fn special_case(e: &EvalSection) -> Result<SpecialCase, CliError> {
    match e.case.as_deref() {
        Some("lambda0-zero") => Ok(SpecialCase::Lambda0Zero),
        Some("lambda1-zero") => Ok(SpecialCase::Lambda1Zero),
        other => Err(CliError::Config(format!(
            "case must be lambda0-zero or lambda1-zero, got {}",
            other.unwrap_or("nothing")
        ))),
    }
}

fn evaluate(quantity: &str, p: &ModelParams, e: &EvalSection) -> Result<Vec<Value>, Error> {
    let ctl = SeriesControl::default();
    let quad = QuadControl::default();
    let start = Regime::from_index(usize::from(e.start)).unwrap_or(Regime::R0);
    let end = Regime::from_index(usize::from(e.end)).unwrap_or(Regime::R0);
    Ok(match quantity {
        "hyper-quad" => {
            let h = hyper_quad(e.q, p);
            [("beta0", h.beta0), ("beta1", h.beta1), ("b0", h.b0), ("b1", h.b1)]
                .into_iter()
                .map(|(label, value)| Value {
                    label: Some(label),
                    value,
                    method: "closed-form",
                    terms: None,
                })
                .collect()
        }
        "laplace-falling" => {
            let s = laplace_falling_summed(e.q, e.x, start, p, &ctl)?;
            vec![Value {
                label: None,
                value: s.value,
                method: "series",
                terms: Some(s.terms),
            }]
        }
        "laplace-falling-special" => unreachable!("handled by the caller"),
        "mean-falling" => {
            let m = mean_falling(e.x, start, p, &ctl)?;
            vec![Value {
                label: None,
                value: m.value,
                method: m.method.as_str(),
                terms: Some(m.terms),
            }]
        }
        "occupation-probs" => {
            let o = occupation_probs(e.t, p, &ctl)?;
            [("p00", o.p00), ("p01", o.p01), ("p10", o.p10), ("p11", o.p11)]
                .into_iter()
                .map(|(label, value)| Value {
                    label: Some(label),
                    value,
                    method: "series",
                    terms: None,
                })
                .collect()
        }
        "mgf-gamma" => single(mgf_gamma(e.t, start, p, &ctl)?, "series"),
        "mean-x" => single(mean_x(e.t, e.x, start, p, &ctl, &quad)?, "quadrature"),
        "mean-x-symmetric" => single(mean_x_symmetric(e.t, e.x, start, p)?, "closed-form"),
        "var-x-symmetric" => single(var_x_symmetric(e.t, p)?, "closed-form"),
        "kac-limit-reference" => {
            let (mean, var) = kac_limit_reference(e.t, e.x, p.gamma0(), e.sigma)?;
            vec![
                Value {
                    label: Some("mean"),
                    value: mean,
                    method: "closed-form",
                    terms: None,
                },
                Value {
                    label: Some("variance"),
                    value: var,
                    method: "closed-form",
                    terms: None,
                },
            ]
        }
        "tau-cross" => {
            let branch = match start {
                Regime::R0 => TauBranch::Tau0,
                Regime::R1 => TauBranch::Tau1,
            };
            single(tau_cross(branch, e.y, e.t, e.x, p)?, "closed-form")
        }
        "joint-density" => single(joint_density(e.y, e.t, e.n, e.x, start, p)?, "closed-form"),
        "telegraph-density" => single(telegraph_density(start, end, e.t, p, &ctl)?.density(e.y), "series"),
        "telegraph-atom" => single(telegraph_density(start, end, e.t, p, &ctl)?.atom_mass(), "closed-form"),
        "telegraph-moment" => {
            let order = match e.order {
                2 => MomentOrder::Second,
                _ => MomentOrder::First,
            };
            let s = telegraph_moment_summed(order, start, end, e.t, p, &ctl)?;
            vec![Value {
                label: None,
                value: s.value,
                method: "series",
                terms: Some(s.terms),
            }]
        }
        "telegraph-cov" => single(telegraph_cov(start, e.t, e.s, p, &ctl)?, "series"),
        "mgf-restricted" => single(mgf_restricted(e.z, e.t, e.n, start, p, &ctl)?, "series"),
        _ => unreachable!("quantity names are checked up front"),
    })
}

pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let quantity = cfg
        .quantity
        .as_deref()
        .ok_or_else(|| CliError::Config(format!("--quantity is required; one of {}", QUANTITIES.join(", "))))?;
    if !QUANTITIES.contains(&quantity) {
        return Err(CliError::Config(format!("unknown quantity '{quantity}'; one of {}", QUANTITIES.join(", "))));
    }
    let params = model_params(cfg)?;
    regime(cfg.eval.start, "start")?;
    regime(cfg.eval.end, "end")?;
    if quantity == "telegraph-moment" {
        order(&cfg.eval)?;
    }
    let case = if quantity == "laplace-falling-special" { Some(special_case(&cfg.eval)?) } else { None };
    let points: Vec<EvalSection> = match cfg.eval.grid_axis()? {
        Some((axis, values)) => values.iter().map(|&v| cfg.eval.with(&axis, v)).collect(),
        None => vec![cfg.eval.clone()],
    };

    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    let mut worst: Option<CliError> = None;
    for e in &points {
        let result = match case {
            Some(case) => {
                let start = Regime::from_index(usize::from(e.start)).unwrap_or(Regime::R0);
                laplace_falling_special(case, e.q, e.x, start, &params, &SeriesControl::default())
                    .map(|v| single(v, "closed-form"))
            }
            None => evaluate(quantity, &params, e),
        };
        let lead = |label: Option<&str>| match label {
            Some(l) => format!("{quantity}.{l}"),
            None => quantity.to_string(),
        };
        let inputs = [e.start.to_string(), num(e.t), num(e.s), num(e.x), num(e.q), e.n.to_string()];
        match result {
            Ok(values) => {
                for v in values {
                    let mut row = vec![lead(v.label)];
                    row.extend(inputs.iter().cloned());
                    row.push(num(v.value));
                    row.push(v.method.to_string());
                    row.push(v.terms.map(|t| t.to_string()).unwrap_or_default());
                    row.push(String::new());
                    w.write_record(&row)?;
                }
            }
            Err(err) => {
                let mut row = vec![lead(None)];
                row.extend(inputs.iter().cloned());
                row.extend([String::new(), String::new(), String::new(), err.to_string()]);
                w.write_record(&row)?;
                let cli: CliError = err.into();
                // convergence failures outrank other row errors
                if worst.as_ref().is_none_or(|w| w.exit_code() != 4) {
                    worst = Some(cli);
                }
            }
        }
    }
    w.flush()?;
    match worst {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

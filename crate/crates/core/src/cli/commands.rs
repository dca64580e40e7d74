//! The four subcommands. Each takes a resolved [`RunConfig`] and returns the
//! rendered output; writing it out is left to the caller.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ConfigError, RunConfig};
use crate::circuit::{EvalContext, Network};
use crate::closedform::{self, FilterBand};
use crate::error::Error;
use crate::families::{build_and_measure, Family, FamilyImpedance, FamilyParams, FamilySpec};
use crate::limits::{default_start, double_limit, iterate_family, IterationStatus};
use crate::reduce::effective_impedance;

/// Residual bound for the closed-form hanoi solution in `validate`.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Numeric(#[from] Error),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Io(_) => 1,
            CommandError::Config(_) => 3,
            CommandError::Numeric(Error::InvalidParameter(_) | Error::InvalidContext { .. }) => 3,
            CommandError::Numeric(_) => 4,
        }
    }
}

/// Rendered command output. `passed` is false only for a failed validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, passed: true }
    }
}

/// Seventeen significant digits, so that a value round-trips exactly.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, CommandError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CommandError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CommandError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CommandError::Io(e.to_string()))
}

/// Frequency sweep of the closed form, optionally with the regularized
/// limit alongside. With a network file, sweeps that network instead.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Output, CommandError> {
    if let Some(path) = &cfg.network {
        return sweep_network(cfg, path);
    }
    let params = cfg.params();
    let band = closedform::band(&params)?;
    let family = params.family();

    let mut header = vec!["omega", "re_z", "im_z", "in_band"];
    match family {
        Family::Ladder => header.extend(["re_alpha", "im_alpha", "abs_alpha"]),
        Family::Hanoi => header.extend(["re_zv", "im_zv", "re_zl", "im_zl"]),
        Family::Sg => {}
    }
    if cfg.oracle {
        header.extend(["re_z_num", "im_z_num"]);
    }

    let rows = cfg
        .omega
        .points()
        .par_iter()
        .map(|&w| sweep_row(cfg, &params, &band, w))
        .collect::<Result<Vec<_>, Error>>()?;
    to_csv(&header, &rows).map(Output::ok)
}

fn sweep_row(cfg: &RunConfig, params: &FamilyParams, band: &FilterBand, omega: f64) -> Result<Vec<String>, Error> {
    let value = closedform::characteristic(params, omega)?;
    let z = value.primary();
    let mut row = vec![num(omega), num(z.re), num(z.im), u8::from(band.contains(omega)).to_string()];
    match (*params, value) {
        (FamilyParams::Ladder { l, c }, _) => {
            let a = closedform::ladder_alpha(omega, l, c)?;
            row.extend([num(a.re), num(a.im), num(a.norm())]);
        }
        (FamilyParams::Hanoi { .. }, FamilyImpedance::Pair { zv, zl }) => {
            row.extend([num(zv.re), num(zv.im), num(zl.re), num(zl.im)]);
        }
        _ => {}
    }
    if cfg.oracle {
        let numeric = double_limit(params, omega, &cfg.oracle_schedule(), cfg.tolerance)
            .map(|d| d.value.primary())
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        row.extend([num(numeric.re), num(numeric.im)]);
    }
    Ok(row)
}

fn sweep_network(cfg: &RunConfig, path: &Path) -> Result<Output, CommandError> {
    let text = std::fs::read_to_string(path).map_err(|e| CommandError::Io(format!("{}: {e}", path.display())))?;
    let net = Network::from_json(&text)
        .map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?;
    let (a, b) = match net.boundary() {
        [a, b, ..] => (*a, *b),
        _ => {
            return Err(ConfigError::Invalid(format!(
                "{}: need at least two boundary nodes",
                path.display()
            ))
            .into())
        }
    };
    let rows = cfg
        .omega
        .points()
        .par_iter()
        .map(|&w| {
            let ctx = EvalContext::new(w, cfg.epsilon)?;
            let z = effective_impedance(&net, &ctx, a, b)?;
            Ok(vec![num(w), num(z.re), num(z.im)])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    to_csv(&["omega", "re_z", "im_z"], &rows).map(Output::ok)
}

#[derive(Debug, Clone, Serialize)]
struct BandReport {
    family: Family,
    omega_lo: Option<f64>,
    omega_hi: Option<f64>,
    nonempty: bool,
}

/// The pass band as JSON; infinite or missing endpoints are `null`.
pub fn cmd_band(cfg: &RunConfig) -> Result<Output, CommandError> {
    let params = cfg.params();
    let band = closedform::band(&params)?;
    let finite = |x: f64| (band.nonempty && x.is_finite()).then_some(x);
    let report = BandReport {
        family: params.family(),
        omega_lo: finite(band.omega_lo),
        omega_hi: finite(band.omega_hi),
        nonempty: band.nonempty,
    };
    Ok(Output::ok(serde_json::to_string(&report).expect("band report serializes")))
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateRow {
    pub omega: f64,
    pub closed_form: Option<FamilyImpedance>,
    /// `converged`, `cycle`, `max_iterations` or `diverged`.
    pub iterate_status: String,
    pub iterations: usize,
    pub iterate: Option<FamilyImpedance>,
    pub iterate_deviation: Option<f64>,
    pub network: Option<FamilyImpedance>,
    pub network_deviation: Option<f64>,
    /// Relative residuals of the two hanoi self-consistency equations.
    pub residuals: Option<[f64; 2]>,
    pub errors: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub family: Family,
    pub depth: u32,
    pub epsilon: f64,
    pub tolerance: f64,
    pub expect_divergence: bool,
    pub max_deviation: f64,
    pub passed: bool,
    pub rows: Vec<ValidateRow>,
}

/// Compares, at every grid frequency, the closed form with the iterated map
/// at the configured ε and with the reduced level-N network.
pub fn validate(cfg: &RunConfig) -> ValidateReport {
    let rows: Vec<ValidateRow> = cfg
        .omega
        .points()
        .par_iter()
        .map(|&w| validate_row(cfg, w))
        .collect();
    let max_deviation = rows
        .iter()
        .flat_map(|r| [r.iterate_deviation, r.network_deviation])
        .flatten()
        .fold(0.0, f64::max);
    ValidateReport {
        family: cfg.spec.family,
        depth: cfg.spec.depth,
        epsilon: cfg.epsilon,
        tolerance: cfg.tolerance,
        expect_divergence: cfg.expect_divergence,
        max_deviation,
        passed: rows.iter().all(|r| r.passed),
        rows,
    }
}

fn validate_row(cfg: &RunConfig, omega: f64) -> ValidateRow {
    let params = cfg.params();
    let mut errors = Vec::new();
    let mut note = |e: Error, what: &str| errors.push(format!("{what}: {e}"));

    let closed = closedform::characteristic(&params, omega)
        .map_err(|e| note(e, "closed form"))
        .ok();
    let residuals = match (params, closed) {
        (FamilyParams::Hanoi { l, c, r }, Some(FamilyImpedance::Pair { zv, zl })) => {
            let (a, b) = closedform::hanoi_residuals(zv, zl, omega, l, c, r);
            Some([a, b])
        }
        _ => None,
    };

    let ctx = EvalContext::new(omega, cfg.epsilon);
    let (status, iterations, iterate) = match &ctx {
        Ok(ctx) => match iterate_family(&params, ctx, default_start(&params)) {
            Ok(rep) => {
                let status = match rep.status {
                    IterationStatus::Converged => "converged",
                    IterationStatus::CycleDetected { .. } => "cycle",
                    IterationStatus::MaxIterations => "max_iterations",
                };
                (status, rep.iterations, rep.value)
            }
            Err(_) => ("diverged", 0, None),
        },
        Err(_) => ("not_run", 0, None),
    };
    let network = match &ctx {
        Ok(ctx) => build_and_measure(&cfg.spec, ctx).map_err(|e| note(e, "network")).ok(),
        Err(e) => {
            note(e.clone(), "context");
            None
        }
    };

    let deviation = |v: Option<FamilyImpedance>| match (v, closed) {
        (Some(v), Some(c)) => Some(v.relative_deviation(&c)),
        _ => None,
    };
    let iterate_deviation = deviation(iterate);
    let network_deviation = deviation(network);

    let passed = if cfg.expect_divergence {
        status != "converged"
    } else {
        errors.is_empty()
            && status == "converged"
            && iterate_deviation.is_some_and(|d| d <= cfg.tolerance)
            && network_deviation.is_some_and(|d| d <= cfg.tolerance)
            && residuals.is_none_or(|[a, b]| a <= RESIDUAL_TOL && b <= RESIDUAL_TOL)
    };
    ValidateRow {
        omega,
        closed_form: closed,
        iterate_status: status.to_string(),
        iterations,
        iterate,
        iterate_deviation,
        network,
        network_deviation,
        residuals,
        errors,
        passed,
    }
}

/// [`validate`] rendered as pretty JSON.
pub fn cmd_validate(cfg: &RunConfig) -> Result<Output, CommandError> {
    let report = validate(cfg);
    let text = serde_json::to_string_pretty(&report).expect("validation report serializes");
    Ok(Output {
        text,
        passed: report.passed,
    })
}

/// Table of level-N, regularization-ε network values at one frequency.
/// Points where the network resonates are reported as NaN.
pub fn cmd_converge(cfg: &RunConfig) -> Result<Output, CommandError> {
    let params = cfg.params();
    let omega = cfg.at;
    let reference = closedform::characteristic(&params, omega).map(|v| v.primary()).ok();
    let cases: Vec<(f64, u32)> = cfg
        .converge_epsilons()
        .into_iter()
        .flat_map(|e| cfg.depths.iter().map(move |&n| (e, n)))
        .collect();
    let rows: Vec<Vec<String>> = cases
        .par_iter()
        .map(|&(epsilon, depth)| {
            let spec = FamilySpec { depth, ..cfg.spec };
            let z = EvalContext::new(omega, epsilon)
                .and_then(|ctx| build_and_measure(&spec, &ctx))
                .map(|v| v.primary())
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            let err = reference.map_or(f64::NAN, |r| (z - r).norm());
            vec![num(epsilon), depth.to_string(), num(z.re), num(z.im), num(err)]
        })
        .collect();
    to_csv(&["epsilon", "n", "re_z", "im_z", "abs_err_vs_closedform"], &rows).map(Output::ok)
}

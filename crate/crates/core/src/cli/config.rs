//! Run configuration: a JSON file merged with command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer};

use crate::families::{Family, FamilyParams, FamilySpec, Termination};
use crate::limits::DEFAULT_EPS_SCHEDULE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

/// Frequency grid as read from a file; every field may be left out.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridInput {
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
    pub spacing: Option<Spacing>,
}

/// Unresolved configuration. Both the JSON file and the command-line flags
/// produce one of these; [`ConfigInput::overlay`] lets flags win.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigInput {
    pub family: Option<Family>,
    #[serde(rename = "L")]
    pub inductance: Option<f64>,
    #[serde(rename = "C")]
    pub capacitance: Option<f64>,
    pub r: Option<f64>,
    pub depth: Option<u32>,
    #[serde(default, deserialize_with = "termination_input")]
    pub termination: Option<Termination>,
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub omega: GridInput,
    pub output: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub depths: Option<Vec<u32>>,
    pub epsilons: Option<Vec<f64>>,
    pub at: Option<f64>,
    pub oracle: Option<bool>,
    pub expect_divergence: Option<bool>,
    pub network: Option<PathBuf>,
}

/// Terminations may be written as in the flag syntax (`"fixed:1,0.5"`) or in
/// the structured form (`{"fixed": [1, 0.5]}`).
fn termination_input<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Termination>, D::Error> {
    let value = Option::<serde_json::Value>::deserialize(de)?;
    match value {
        None | Some(serde_json::Value::Null) => Ok(None),
        Some(serde_json::Value::String(s)) => s.parse().map(Some).map_err(serde::de::Error::custom),
        Some(other) => serde_json::from_value(other).map(Some).map_err(serde::de::Error::custom),
    }
}

impl ConfigInput {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            ConfigError::Invalid(msg) => ConfigError::Invalid(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Fields set in `top` replace those in `self`.
    pub fn overlay(self, top: ConfigInput) -> ConfigInput {
        ConfigInput {
            family: top.family.or(self.family),
            inductance: top.inductance.or(self.inductance),
            capacitance: top.capacitance.or(self.capacitance),
            r: top.r.or(self.r),
            depth: top.depth.or(self.depth),
            termination: top.termination.or(self.termination),
            epsilon: top.epsilon.or(self.epsilon),
            omega: GridInput {
                start: top.omega.start.or(self.omega.start),
                stop: top.omega.stop.or(self.omega.stop),
                count: top.omega.count.or(self.omega.count),
                spacing: top.omega.spacing.or(self.omega.spacing),
            },
            output: top.output.or(self.output),
            tolerance: top.tolerance.or(self.tolerance),
            depths: top.depths.or(self.depths),
            epsilons: top.epsilons.or(self.epsilons),
            at: top.at.or(self.at),
            oracle: top.oracle.or(self.oracle),
            expect_divergence: top.expect_divergence.or(self.expect_divergence),
            network: top.network.or(self.network),
        }
    }

    /// Applies defaults and checks every invariant.
    pub fn resolve(self) -> Result<RunConfig, ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        let family = match (self.family, &self.network) {
            (Some(f), _) => f,
            (None, Some(_)) => Family::Ladder,
            (None, None) => return invalid("no circuit family given (ladder, sg or hanoi)".into()),
        };
        let params = match family {
            Family::Ladder => FamilyParams::Ladder {
                l: self.inductance.unwrap_or(1.0),
                c: self.capacitance.unwrap_or(1.0),
            },
            Family::Sg => FamilyParams::Sg {
                l: self.inductance.unwrap_or(1.0),
                c: self.capacitance.unwrap_or(1.0),
            },
            Family::Hanoi => FamilyParams::Hanoi {
                l: self.inductance.unwrap_or(1.0),
                c: self.capacitance.unwrap_or(1.0),
                r: self.r.unwrap_or(0.5),
            },
        };
        let spec = FamilySpec::new(params, self.depth.unwrap_or(6), self.termination.unwrap_or_default());
        if let Err(e) = spec.validate() {
            return invalid(e.to_string());
        }

        let epsilon = self.epsilon.unwrap_or(1e-3);
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return invalid(format!("epsilon must be finite and non-negative, got {epsilon}"));
        }

        let count = self.omega.count.unwrap_or(50);
        let start = self.omega.start.unwrap_or(0.1);
        let stop = self.omega.stop.unwrap_or(if count == 1 { start } else { 10.0 });
        let spacing = self.omega.spacing.unwrap_or_default();
        let grid = OmegaGrid {
            start,
            stop,
            count,
            spacing,
        };
        grid.check()?;

        let tolerance = self.tolerance.unwrap_or(2e-2);
        if !(tolerance > 0.0) {
            return invalid(format!("tolerance must be positive, got {tolerance}"));
        }
        let depths = self.depths.unwrap_or_else(|| (0..=spec.depth).collect());
        if depths.is_empty() {
            return invalid("depth list is empty".into());
        }
        let epsilons = self.epsilons;
        if let Some(list) = &epsilons {
            if list.is_empty() || list.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) {
                return invalid("epsilon list must be non-empty, finite and non-negative".into());
            }
        }
        let at = self.at.unwrap_or(start);
        if !(at > 0.0) || !at.is_finite() {
            return invalid(format!("evaluation frequency must be positive, got {at}"));
        }

        Ok(RunConfig {
            spec,
            epsilon,
            omega: grid,
            output: self.output,
            tolerance,
            depths,
            epsilons,
            at,
            oracle: self.oracle.unwrap_or(false),
            expect_divergence: self.expect_divergence.unwrap_or(false),
            network: self.network,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl OmegaGrid {
    fn check(&self) -> Result<(), ConfigError> {
        let ok = self.count >= 1
            && self.start > 0.0
            && self.start.is_finite()
            && self.stop.is_finite()
            && (self.start < self.stop || (self.count == 1 && self.start == self.stop));
        if ok {
            Ok(())
        } else {
            Err(ConfigError::Invalid(format!(
                "frequency grid needs count ≥ 1 and 0 < start < stop, got start = {}, stop = {}, count = {}",
                self.start, self.stop, self.count
            )))
        }
    }

    /// The grid points, endpoints included.
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                let t = k as f64 / last;
                if k + 1 == self.count {
                    return self.stop;
                }
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * t,
                    Spacing::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: FamilySpec,
    pub epsilon: f64,
    pub omega: OmegaGrid,
    pub output: Option<PathBuf>,
    /// Relative deviation allowed by `validate`.
    pub tolerance: f64,
    /// Depths tabulated by `converge`.
    pub depths: Vec<u32>,
    /// Regularizations tabulated by `converge` and used by the sweep oracle.
    pub epsilons: Option<Vec<f64>>,
    /// Frequency used by `converge`.
    pub at: f64,
    pub oracle: bool,
    pub expect_divergence: bool,
    /// A network file swept instead of a family.
    pub network: Option<PathBuf>,
}

impl RunConfig {
    pub fn params(&self) -> FamilyParams {
        self.spec.params()
    }

    /// Regularizations for `converge`: the list if given, else `epsilon` alone.
    pub fn converge_epsilons(&self) -> Vec<f64> {
        self.epsilons.clone().unwrap_or_else(|| vec![self.epsilon])
    }

    /// Schedule for the sweep oracle: the list if given, else the default.
    pub fn oracle_schedule(&self) -> Vec<f64> {
        self.epsilons
            .clone()
            .unwrap_or_else(|| DEFAULT_EPS_SCHEDULE.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read configuration: {0}")]
    Io(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

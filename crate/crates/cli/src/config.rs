//! Run configuration: a flat `key = value` file overlaid with command-line flags.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment
//! key = value   # trailing comments are allowed
//! ```
//!
//! Blank lines are ignored, keys are case-sensitive, and a key given twice
//! keeps its last value. Model keys are `beta R y_L y_H lambda theta mu A M`;
//! run keys are `var from to points z0 periods agents seed protocol output`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use dfm_core::{Protocol, RawParams};
use thiserror::Error;

pub const MODEL_KEYS: [&str; 9] = ["beta", "R", "y_L", "y_H", "lambda", "theta", "mu", "A", "M"];
pub const RUN_KEYS: [&str; 10] =
    ["var", "from", "to", "points", "z0", "periods", "agents", "seed", "protocol", "output"];
pub const SWEEP_VARS: [&str; 7] = ["mu", "lambda", "theta", "y_H", "y_L", "beta", "R"];

const REQUIRED: [&str; 6] = ["beta", "R", "y_L", "y_H", "lambda", "mu"];

pub const DEFAULT_THETA: f64 = 0.5;
pub const DEFAULT_ASSET_SUPPLY: f64 = 1.0;
pub const DEFAULT_MONEY_STOCK: f64 = 1.0;
pub const DEFAULT_DYNAMICS_PERIODS: usize = 50;
pub const DEFAULT_SIM_PERIODS: usize = 200;
pub const DEFAULT_AGENTS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key '{key}'; valid keys: {keys}", keys = valid_keys())]
    UnknownKey { key: String, line: usize },
    #[error("unknown flag key '{0}'; valid keys: {keys}", keys = valid_keys())]
    UnknownFlag(String),
    #[error("line {line}, column {column}: '{key}' expects {expected}, got '{value}'")]
    TypeMismatch { key: String, line: usize, column: usize, expected: &'static str, value: String },
    #[error("flag --{key} expects {expected}, got '{value}'")]
    FlagMismatch { key: String, expected: &'static str, value: String },
    #[error("line {line}: expected 'key = value'")]
    Malformed { line: usize },
    #[error("{0} required")]
    Missing(&'static str),
    #[error("sweep: {0}")]
    Sweep(String),
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn valid_keys() -> String {
    MODEL_KEYS.iter().chain(RUN_KEYS.iter()).copied().collect::<Vec<_>>().join(", ")
}

/// Where a value came from, for error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line { line: usize, column: usize },
    Flag,
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    text: String,
    origin: Origin,
}

/// Raw key-value settings before typing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    entries: BTreeMap<String, Entry>,
}

fn is_known(key: &str) -> bool {
    MODEL_KEYS.contains(&key) || RUN_KEYS.contains(&key)
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Malformed { line })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::Malformed { line });
            }
            if !is_known(key) {
                return Err(ConfigError::UnknownKey { key: key.to_string(), line });
            }
            let offset = content.find('=').unwrap() + 1;
            let column = offset + (value.len() - value.trim_start().len()) + 1;
            entries.insert(
                key.to_string(),
                Entry { text: value.trim().to_string(), origin: Origin::Line { line, column } },
            );
        }
        Ok(Settings { entries })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Sets `key` from a command-line flag, overriding any file value.
    pub fn set_flag(&mut self, key: &str, value: impl fmt::Display) -> Result<(), ConfigError> {
        if !is_known(key) {
            return Err(ConfigError::UnknownFlag(key.to_string()));
        }
        self.entries.insert(key.to_string(), Entry { text: value.to_string(), origin: Origin::Flag });
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn typed<V: std::str::FromStr>(&self, key: &str, expected: &'static str) -> Result<Option<V>, ConfigError> {
        let Some(entry) = self.entries.get(key) else {
            return Ok(None);
        };
        entry.text.parse().map(Some).map_err(|_| {
            let (key, value) = (key.to_string(), entry.text.clone());
            match entry.origin {
                Origin::Line { line, column } => ConfigError::TypeMismatch { key, line, column, expected, value },
                Origin::Flag => ConfigError::FlagMismatch { key, expected, value },
            }
        })
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.typed(key, "a number")
    }

    fn required(&self, key: &'static str) -> Result<f64, ConfigError> {
        self.number(key)?.ok_or(ConfigError::Missing(key))
    }

    pub fn model_params(&self) -> Result<RawParams<f64>, ConfigError> {
        for key in REQUIRED {
            if !self.contains(key) {
                return Err(ConfigError::Missing(key));
            }
        }
        Ok(RawParams {
            beta: self.required("beta")?,
            dividend: self.required("R")?,
            y_low: self.required("y_L")?,
            y_high: self.required("y_H")?,
            lambda: self.required("lambda")?,
            theta: self.number("theta")?.unwrap_or(DEFAULT_THETA),
            mu: self.required("mu")?,
            asset_supply: self.number("A")?.unwrap_or(DEFAULT_ASSET_SUPPLY),
            money_stock: self.number("M")?.unwrap_or(DEFAULT_MONEY_STOCK),
        })
    }

    pub fn sweep(&self) -> Result<SweepSpec, ConfigError> {
        let var: String = self.typed("var", "a variable name")?.ok_or(ConfigError::Missing("var"))?;
        let from = self.number("from")?.ok_or(ConfigError::Missing("from"))?;
        let to = self.number("to")?.ok_or(ConfigError::Missing("to"))?;
        let points = self.typed("points", "a whole number")?.ok_or(ConfigError::Missing("points"))?;
        SweepSpec::new(&var, from, to, points)
    }

    pub fn dynamics(&self) -> Result<DynamicsSpec, ConfigError> {
        Ok(DynamicsSpec {
            z0: self.number("z0")?,
            periods: self.typed("periods", "a whole number")?.unwrap_or(DEFAULT_DYNAMICS_PERIODS),
        })
    }

    pub fn simulation(&self) -> Result<SimulationSpec, ConfigError> {
        Ok(SimulationSpec {
            agents: self.typed("agents", "a whole number")?.unwrap_or(DEFAULT_AGENTS),
            periods: self.typed("periods", "a whole number")?.unwrap_or(DEFAULT_SIM_PERIODS),
            seed: self.typed("seed", "a whole number")?.unwrap_or(DEFAULT_SEED),
            protocol: self.typed("protocol", "price_taking or bargaining")?.unwrap_or(Protocol::PriceTaking),
        })
    }

    pub fn output(&self) -> Option<PathBuf> {
        self.entries.get("output").map(|e| PathBuf::from(&e.text))
    }
}

/// Which model parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Mu,
    Lambda,
    Theta,
    YHigh,
    YLow,
    Beta,
    Dividend,
}

impl SweepVar {
    pub fn key(self) -> &'static str {
        match self {
            SweepVar::Mu => "mu",
            SweepVar::Lambda => "lambda",
            SweepVar::Theta => "theta",
            SweepVar::YHigh => "y_H",
            SweepVar::YLow => "y_L",
            SweepVar::Beta => "beta",
            SweepVar::Dividend => "R",
        }
    }

    pub fn apply(self, raw: &mut RawParams<f64>, value: f64) {
        match self {
            SweepVar::Mu => raw.mu = value,
            SweepVar::Lambda => raw.lambda = value,
            SweepVar::Theta => raw.theta = value,
            SweepVar::YHigh => raw.y_high = value,
            SweepVar::YLow => raw.y_low = value,
            SweepVar::Beta => raw.beta = value,
            SweepVar::Dividend => raw.dividend = value,
        }
    }
}

impl std::str::FromStr for SweepVar {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "mu" => SweepVar::Mu,
            "lambda" => SweepVar::Lambda,
            "theta" => SweepVar::Theta,
            "y_H" => SweepVar::YHigh,
            "y_L" => SweepVar::YLow,
            "beta" => SweepVar::Beta,
            "R" => SweepVar::Dividend,
            other => {
                return Err(ConfigError::Sweep(format!(
                    "cannot sweep '{other}'; choose one of {}",
                    SWEEP_VARS.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub var: SweepVar,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl SweepSpec {
    pub fn new(var: &str, from: f64, to: f64, points: usize) -> Result<Self, ConfigError> {
        let var = var.parse()?;
        if points < 2 {
            return Err(ConfigError::Sweep(format!("need at least 2 points, got {points}")));
        }
        if !(from < to) {
            return Err(ConfigError::Sweep(format!("start {from} must be below stop {to}")));
        }
        Ok(SweepSpec { var, from, to, points })
    }

    pub fn step(&self) -> f64 {
        (self.to - self.from) / (self.points - 1) as f64
    }

    /// Grid values; the last one is `to` exactly.
    pub fn grid(&self) -> Vec<f64> {
        let step = self.step();
        (0..self.points).map(|i| if i + 1 == self.points { self.to } else { self.from + i as f64 * step }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsSpec {
    /// Initial real balances; the fixed point when absent.
    pub z0: Option<f64>,
    pub periods: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSpec {
    pub agents: usize,
    pub periods: usize,
    pub seed: u64,
    pub protocol: Protocol,
}

//! Command-line front end for `dfm-core`: solves, sweeps, dynamics traces,
//! bargaining contrasts and simulations, with text reports and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dfm_core::{EquilibriumError, SimulationError, ValidationErrors};
use thiserror::Error;

pub use config::{ConfigError, Settings, SweepSpec, SweepVar};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid parameters: {0}")]
    Validation(#[from] ValidationErrors),
    #[error("invalid run: {0}")]
    InvalidRun(String),
    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(ConfigError::Io { .. }) | CliError::Io { .. } => 4,
            CliError::Config(_) | CliError::Validation(_) | CliError::InvalidRun(_) => 2,
            CliError::NoEquilibrium(_) => 3,
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<EquilibriumError> for CliError {
    fn from(e: EquilibriumError) -> Self {
        CliError::NoEquilibrium(e.to_string())
    }
}

impl From<SimulationError> for CliError {
    fn from(e: SimulationError) -> Self {
        match e {
            SimulationError::OddPopulation(_) | SimulationError::EmptyRun => CliError::InvalidRun(e.to_string()),
            other => CliError::NoEquilibrium(other.to_string()),
        }
    }
}

impl From<dfm_core::DomainError> for CliError {
    fn from(e: dfm_core::DomainError) -> Self {
        CliError::NoEquilibrium(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "dfm", version, about = "Equilibrium solver and simulator for an illiquid financial market")]
pub struct Cli {
    /// Config file of `key = value` lines.
    #[arg(long, short = 'c', env = "DFM_CONFIG", global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub params: ParamFlags,

    /// Write CSV output here instead of (or in addition to) stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

/// Model parameters; each overrides the config file.
#[derive(Debug, Default, Args)]
pub struct ParamFlags {
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long = "R", global = true, allow_hyphen_values = true)]
    pub dividend: Option<f64>,
    #[arg(long = "y_L", global = true, allow_hyphen_values = true)]
    pub y_low: Option<f64>,
    #[arg(long = "y_H", global = true, allow_hyphen_values = true)]
    pub y_high: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long = "A", global = true, allow_hyphen_values = true)]
    pub asset_supply: Option<f64>,
    #[arg(long = "M", global = true, allow_hyphen_values = true)]
    pub money_stock: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady state under price taking.
    Solve,
    /// Steady-state asset price over a grid of one parameter.
    Sweep {
        #[arg(long)]
        var: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Path of real balances and the asset price from an initial condition.
    Dynamics {
        #[arg(long, allow_hyphen_values = true)]
        z0: Option<f64>,
        #[arg(long = "periods", short = 'T')]
        periods: Option<usize>,
    },
    /// Agent-level Monte Carlo of the market.
    Simulate {
        #[arg(long, short = 'N')]
        agents: Option<usize>,
        #[arg(long = "periods", short = 'T')]
        periods: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        protocol: Option<String>,
    },
    /// Price taking against Nash bargaining at the same parameters.
    Bargain,
}

impl Cli {
    /// Config file values overlaid with flags.
    pub fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let p = &self.params;
        let flags = [
            ("beta", p.beta),
            ("R", p.dividend),
            ("y_L", p.y_low),
            ("y_H", p.y_high),
            ("lambda", p.lambda),
            ("theta", p.theta),
            ("mu", p.mu),
            ("A", p.asset_supply),
            ("M", p.money_stock),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                s.set_flag(key, v)?;
            }
        }
        if let Some(out) = &self.output {
            s.set_flag("output", out.display())?;
        }
        match &self.command {
            Command::Solve | Command::Bargain => {}
            Command::Sweep { var, from, to, points } => {
                set_opt(&mut s, "var", var)?;
                set_opt(&mut s, "from", from)?;
                set_opt(&mut s, "to", to)?;
                set_opt(&mut s, "points", points)?;
            }
            Command::Dynamics { z0, periods } => {
                set_opt(&mut s, "z0", z0)?;
                set_opt(&mut s, "periods", periods)?;
            }
            Command::Simulate { agents, periods, seed, protocol } => {
                set_opt(&mut s, "agents", agents)?;
                set_opt(&mut s, "periods", periods)?;
                set_opt(&mut s, "seed", seed)?;
                set_opt(&mut s, "protocol", protocol)?;
            }
        }
        Ok(s)
    }
}

fn set_opt<V: std::fmt::Display>(s: &mut Settings, key: &str, v: &Option<V>) -> Result<(), ConfigError> {
    match v {
        Some(v) => s.set_flag(key, v),
        None => Ok(()),
    }
}

/// Runs the parsed command, writing reports to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let settings = cli.settings()?;
    match cli.command {
        Command::Solve => commands::cmd_solve(&settings, out),
        Command::Sweep { .. } => commands::cmd_sweep(&settings, out),
        Command::Dynamics { .. } => commands::cmd_dynamics(&settings, out),
        Command::Simulate { .. } => commands::cmd_simulate(&settings, out),
        Command::Bargain => commands::cmd_bargain(&settings, out),
    }
}

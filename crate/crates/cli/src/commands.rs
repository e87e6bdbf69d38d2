use std::io::Write;
use std::path::Path;

use dfm_core::bargaining::ReturnRegime;
use dfm_core::dynamics::{PathFate, DIVERGENCE_FACTOR};
use dfm_core::{
    case_of, fundamental_price, mu_bar_bargaining, psi_curve, real_balance_map, run_simulation_with_records,
    simulate_path, solve_bargaining_equilibrium, solve_steady_state, welfare, ModelParams, RawParams,
};
use rayon::prelude::*;

use crate::config::{Settings, SweepSpec};
use crate::output::{csv, num, provenance, Report};
use crate::CliError;

fn validated(raw: RawParams<f64>) -> Result<ModelParams<f64>, CliError> {
    let v = raw.validate()?;
    for w in &v.warnings {
        eprintln!("warning: {w}");
    }
    Ok(v.params)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::io("stdout", e))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))
}

/// Sends CSV to the configured output file, or to `out` when none is set.
fn emit_csv(settings: &Settings, out: &mut dyn Write, text: &str, rows: usize) -> Result<(), CliError> {
    match settings.output() {
        Some(path) => {
            write_file(&path, text)?;
            emit(out, &format!("wrote {rows} rows to {}\n", path.display()))
        }
        None => emit(out, text),
    }
}

pub fn cmd_solve(settings: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    let raw = settings.model_params()?;
    let p = validated(raw)?;
    let ss = solve_steady_state(&p)?;
    let w = welfare(&ss, &p);
    let mut r = Report::new();
    r.text("case", ss.case)
        .num("psi_star", ss.psi_star)
        .num("fundamental", ss.fundamental)
        .num("premium", ss.liquidity_premium)
        .opt("mu_bar", ss.mu_bar)
        .num("z_star", ss.z_star)
        .num("phi", ss.phi)
        .num("s_star", ss.s_star)
        .opt("p_star", ss.p_star)
        .opt("p_star_real", ss.p_star_real)
        .num("q_star", ss.q_star)
        .num("aggregate_q", ss.aggregate_q)
        .num("welfare_trade_value", ss.welfare_trade_value)
        .num("welfare_surplus", ss.welfare_surplus)
        .text("first_best", w.first_best)
        .text("money_circulates", ss.money_circulates)
        .opt("knife_edge_residual", ss.checks.map(|c| c.knife_edge_residual));
    emit(out, &r.render())?;
    if let Some(path) = settings.output() {
        write_file(&path, &format!("{}{}", provenance(&raw, ""), r.csv_row()))?;
    }
    Ok(())
}

pub const SWEEP_HEADER: [&str; 6] = ["var", "psi_star", "premium", "z_star", "welfare_surplus", "in_range"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub psi_star: f64,
    pub premium: f64,
    pub z_star: f64,
    pub welfare_surplus: f64,
    /// A monetary equilibrium exists at this grid point.
    pub in_range: bool,
}

impl SweepRow {
    fn fields(&self) -> Vec<String> {
        vec![
            num(self.value),
            num(self.psi_star),
            num(self.premium),
            num(self.z_star),
            num(self.welfare_surplus),
            self.in_range.to_string(),
        ]
    }
}

fn sweep_point(p: &ModelParams<f64>, value: f64) -> SweepRow {
    let fundamental = fundamental_price(p);
    // Outside the policy range the price curve is reported as its continuation.
    let psi_star = if case_of(p).is_active() { psi_curve(p) } else { fundamental };
    let (z_star, welfare_surplus, in_range) = match solve_steady_state(p) {
        Ok(ss) if ss.money_circulates => (ss.z_star, ss.welfare_surplus, true),
        _ => (0.0, 0.0, false),
    };
    SweepRow { value, psi_star, premium: psi_star - fundamental, z_star, welfare_surplus, in_range }
}

/// Evaluates the grid in parallel; rows come back in grid order.
pub fn sweep_rows(base: &RawParams<f64>, spec: &SweepSpec) -> Result<Vec<SweepRow>, CliError> {
    spec.grid()
        .into_par_iter()
        .map(|value| {
            let mut raw = *base;
            spec.var.apply(&mut raw, value);
            let p = raw.validate().map_err(CliError::Validation)?.params;
            Ok(sweep_point(&p, value))
        })
        .collect()
}

pub fn cmd_sweep(settings: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    let raw = settings.model_params()?;
    let spec = settings.sweep()?;
    let rows = sweep_rows(&raw, &spec)?;
    let extra = format!("sweep {} from {} to {} points {}", spec.var.key(), num(spec.from), num(spec.to), spec.points);
    let text = format!("{}{}", provenance(&raw, &extra), csv(&SWEEP_HEADER, rows.iter().map(SweepRow::fields)));
    emit_csv(settings, out, &text, rows.len())
}

pub fn cmd_dynamics(settings: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    let raw = settings.model_params()?;
    let p = validated(raw)?;
    let spec = settings.dynamics()?;
    let map = real_balance_map(&p)?;
    let fixed_point =
        map.fixed_point().ok_or_else(|| CliError::NoEquilibrium("real-balance map has unit slope".into()))?;
    let z0 = spec.z0.unwrap_or(fixed_point);
    let report = simulate_path(z0, spec.periods, &map, &p, DIVERGENCE_FACTOR);
    let fate = match report.fate {
        PathFate::Stationary => "stationary".to_string(),
        PathFate::DivergedAt(t) => format!("diverged at t={t}"),
        PathFate::Undecided => "undecided".to_string(),
    };
    let extra = format!(
        "z0={} periods={} fixed_point={} slope={} fate={fate}",
        num(z0),
        spec.periods,
        num(fixed_point),
        num(map.slope)
    );
    let rows = report.states.iter().map(|s| vec![s.t.to_string(), num(s.z), num(s.psi)]);
    let text = format!("{}{}", provenance(&raw, &extra), csv(&["t", "z", "psi"], rows));
    emit_csv(settings, out, &text, report.states.len())
}

pub fn cmd_simulate(settings: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    let raw = settings.model_params()?;
    let p = validated(raw)?;
    let spec = settings.simulation()?;
    let (stats, records) = run_simulation_with_records(&p, spec.agents, spec.periods, spec.seed, spec.protocol)?;
    let mut r = Report::new();
    r.text("protocol", stats.protocol)
        .text("agents", stats.agents)
        .text("periods", stats.periods)
        .text("seed", stats.seed)
        .num("mean_Q", stats.mean_q)
        .num("se_Q", stats.se_q)
        .num("mean_price", stats.mean_price)
        .num("mean_surplus", stats.mean_surplus)
        .num("se_surplus", stats.se_surplus)
        .num("max_conservation_error", stats.max_conservation_error);
    emit(out, &r.render())?;
    if let Some(path) = settings.output() {
        let extra = format!(
            "simulate {} agents={} periods={} seed={}",
            stats.protocol, stats.agents, stats.periods, stats.seed
        );
        let rows = records.iter().map(|r| vec![r.period.to_string(), num(r.q), num(r.price), num(r.surplus)]);
        write_file(&path, &format!("{}{}", provenance(&raw, &extra), csv(&["period", "Q", "price", "surplus"], rows)))?;
    }
    Ok(())
}

pub fn cmd_bargain(settings: &Settings, out: &mut dyn Write) -> Result<(), CliError> {
    let raw = settings.model_params()?;
    let p = validated(raw)?;
    let eq = solve_bargaining_equilibrium(&p);
    let taking = solve_steady_state(&p).ok();
    let regime = match eq.regime {
        ReturnRegime::Good => "good_returns",
        ReturnRegime::KnifeEdge => "knife_edge",
        ReturnRegime::Bad => "bad_returns",
    };
    let mut r = Report::new();
    r.num("fundamental", fundamental_price(&p))
        .num("psi_star", eq.psi_star)
        .opt("psi_star_price_taking", taking.map(|s| s.psi_star))
        .opt("premium_price_taking", taking.map(|s| s.liquidity_premium))
        .opt("mu_bar", taking.and_then(|s| s.mu_bar))
        .num("mu_bar_b", mu_bar_bargaining(&p))
        .text("regime", regime)
        .num("s_star", eq.s_star)
        .opt("real_balances", eq.real_balances)
        .opt("d_m", eq.transfers.map(|t| t.d_m))
        .opt("d_s", eq.transfers.map(|t| t.d_s))
        .opt("seller_valuation", eq.incompatibility.map(|i| i.seller_side))
        .opt("buyer_valuation", eq.incompatibility.map(|i| i.buyer_side))
        .text("policy_admissible", eq.policy_admissible);
    emit(out, &r.render())?;
    if let Some(path) = settings.output() {
        write_file(&path, &format!("{}{}", provenance(&raw, "bargain"), r.csv_row()))?;
    }
    Ok(())
}

//! Equilibrium objects for a monetary economy with an illiquid financial market.
//!
//! Investors hold money and a safe asset, may convert the asset into a risky
//! security, and re-balance in a frictional market either as price takers or
//! by bilateral Nash bargaining. Everything here is closed form; the
//! [`simulation`] module checks aggregates with an agent-level Monte Carlo.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below cover the common case.

// `!(x > 0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bargaining;
pub mod dfm;
pub mod dynamics;
pub mod error;
pub mod investment;
pub mod model;
pub mod scalar;
pub mod simulation;
pub mod steady_state;

pub use bargaining::{
    bargaining_thresholds, mu_bar_bargaining, nash_bargain, optimal_s_bargaining, solve_bargaining_equilibrium,
    BargainingEquilibrium, BargainingOutcome, InvestorType, ReturnRegime,
};
pub use dfm::{clear_market, individual_demand, individual_supply, DfmOutcome, Prices, Regime, TradeCorrespondence};
pub use dynamics::{psi_step, real_balance_map, simulate_path, LinearMap, PathFate, PathReport};
pub use error::{DomainError, EquilibriumError, ParamViolation, SimulationError, ValidationErrors};
pub use investment::{gamma_coefficients, optimal_s, portfolio_choice, GammaCoefficients, InvestmentChoice};
pub use model::{
    case_of, classify_case, derive_coefficients, fundamental_price, validate_params, CaseLabel, DerivedCoefficients,
    ModelParams, ParamWarning, RawParams, Validated,
};
pub use scalar::Scalar;
pub use simulation::{run_simulation, run_simulation_with_records, PeriodRecord, Protocol, SimStats};
pub use steady_state::{
    mu_bar_closed_form, mu_bar_root, policy_range, psi_curve, psi_curve_slope, psi_max, psi_of_mu, solve_steady_state,
    welfare, PolicyRange, SteadyState, Welfare,
};

pub type RawParamsF64 = RawParams<f64>;
pub type ModelParamsF64 = ModelParams<f64>;
pub type ModelParamsF32 = ModelParams<f32>;
pub type DerivedCoefficientsF64 = DerivedCoefficients<f64>;
pub type PricesF64 = Prices<f64>;
pub type DfmOutcomeF64 = DfmOutcome<f64>;
pub type SteadyStateF64 = SteadyState<f64>;
pub type SteadyStateF32 = SteadyState<f32>;
pub type BargainingOutcomeF64 = BargainingOutcome<f64>;
pub type BargainingEquilibriumF64 = BargainingEquilibrium<f64>;
pub type LinearMapF64 = LinearMap<f64>;
pub type SimStatsF64 = SimStats<f64>;

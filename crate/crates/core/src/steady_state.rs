//! Steady-state monetary equilibrium under price taking.

use crate::dfm::{clear_market, Prices};
use crate::error::EquilibriumError;
use crate::investment::{gamma_coefficients, lemma2_check, CarryCostCheck};
use crate::model::{case_of, derive_coefficients, fundamental_price, CaseLabel, ModelParams};
use crate::scalar::Scalar;

/// Absolute tolerance on `mu` for the bisection route to the policy bound.
pub const ROOT_TOLERANCE: f64 = 1e-12;
/// Relative tolerance of the knife-edge portfolio condition at an assembled steady state.
pub const KNIFE_EDGE_TOLERANCE: f64 = 1e-10;

/// Asset price together with the case that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssetPrice<T> {
    pub value: T,
    pub case: CaseLabel,
}

/// Stationary asset price implied by the knife-edge portfolio condition:
///
/// `psi = [beta/2 ((1+lambda) y_H + (1-lambda) y_L) - (1+mu-beta) y_L] / [2(1-beta) + mu]`.
///
/// Evaluated for any `mu`; it is an equilibrium price only on `[beta-1, mu_bar]`.
pub fn psi_curve<T: Scalar>(p: &ModelParams<T>) -> T {
    let one = T::one();
    let numerator = p.beta * p.liquid_return() - (one + p.mu - p.beta) * p.y_low;
    numerator / (T::two() * (one - p.beta) + p.mu)
}

/// `d psi / d mu` of [`psi_curve`], which equals `-(psi + y_L) / (2(1-beta) + mu)`.
pub fn psi_curve_slope<T: Scalar>(p: &ModelParams<T>) -> T {
    -(psi_curve(p) + p.y_low) / (T::two() * (T::one() - p.beta) + p.mu)
}

/// Equilibrium asset price; the fundamental value unless the market is active.
pub fn psi_of_mu<T: Scalar>(p: &ModelParams<T>) -> AssetPrice<T> {
    let case = case_of(p);
    let value = if case.is_active() { psi_curve(p) } else { fundamental_price(p) };
    AssetPrice { value, case }
}

/// Asset price at the Friedman rule, `beta/(1-beta) * (1/2)[(1+lambda) y_H + (1-lambda) y_L]`.
pub fn psi_max<T: Scalar>(p: &ModelParams<T>) -> T {
    p.beta / (T::one() - p.beta) * p.liquid_return()
}

/// Largest money growth rate with a monetary equilibrium, in closed form.
pub fn mu_bar_closed_form<T: Scalar>(p: &ModelParams<T>) -> T {
    let one = T::one();
    let c = derive_coefficients(p);
    p.beta - one + p.beta * (one - p.beta) * c.alpha_sum / (p.y_low * (one - p.beta) + p.beta * p.dividend)
}

/// Largest money growth rate with a monetary equilibrium, by bisection on
/// `psi(mu) - beta R / (1 - beta)`.
///
/// The bracket is `[beta-1, beta-1 + 10 (1-beta) (alpha1+alpha2) / R]`, which
/// contains the root whenever `y_L >= 0`.
pub fn mu_bar_root<T: Scalar>(p: &ModelParams<T>) -> Result<T, EquilibriumError> {
    let c = derive_coefficients(p);
    let lo = p.friedman_rule();
    match case_of(p) {
        CaseLabel::KnifeEdgeCase => return Ok(lo),
        CaseLabel::NoTradeCase => {
            return Err(EquilibriumError::Misbracketed { lo: to_f64(lo), hi: to_f64(lo) });
        }
        CaseLabel::ActiveCase => {}
    }
    let hi = lo + T::lit(10.0) * (T::one() - p.beta) * c.alpha_sum / p.dividend;
    let target = fundamental_price(p);
    let gap = |mu: T| psi_curve(&p.with_mu_unchecked(mu)) - target;

    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (gap(a), gap(b));
    if ga < T::zero() || gb > T::zero() {
        return Err(EquilibriumError::Misbracketed { lo: to_f64(lo), hi: to_f64(hi) });
    }
    let tol = T::tol(ROOT_TOLERANCE);
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let mid = T::half() * (a + b);
        if gap(mid) >= T::zero() {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(T::half() * (a + b))
}

fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Admissible money growth rates `[beta - 1, mu_bar]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyRange<T> {
    pub mu_min: T,
    pub mu_bar: T,
}

impl<T: Scalar> PolicyRange<T> {
    pub fn contains(&self, mu: T) -> bool {
        let slack = T::tol(1e-12) * T::one().max(self.mu_bar.abs());
        mu >= self.mu_min - slack && mu <= self.mu_bar + slack
    }
}

/// Policy range of an active market; `None` otherwise.
pub fn policy_range<T: Scalar>(p: &ModelParams<T>) -> Option<PolicyRange<T>> {
    case_of(p).is_active().then(|| PolicyRange { mu_min: p.friedman_rule(), mu_bar: mu_bar_closed_form(p) })
}

/// Internal consistency of an assembled steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumChecks<T> {
    /// `|gamma1 + gamma2 gamma4 - gamma3 gamma4| / (gamma3 gamma4)`.
    pub knife_edge_residual: T,
    pub carry_costs: CarryCostCheck,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState<T> {
    pub case: CaseLabel,
    pub psi_star: T,
    pub fundamental: T,
    /// Real balances `phi M`.
    pub z_star: T,
    /// Value of a dollar in goods; zero when money does not circulate.
    pub phi: T,
    pub s_star: T,
    /// Dollar price of a security; `None` when the market does not open.
    pub p_star: Option<T>,
    /// `phi p* = psi + y_L`; `None` when the market does not open.
    pub p_star_real: Option<T>,
    pub q_star: T,
    pub aggregate_q: T,
    pub liquidity_premium: T,
    pub welfare_trade_value: T,
    pub welfare_surplus: T,
    /// Upper end of the policy range; `None` outside the active case.
    pub mu_bar: Option<T>,
    /// Money is valued. Outside the active case this happens only at the Friedman rule.
    pub money_circulates: bool,
    pub checks: Option<EquilibriumChecks<T>>,
}

/// Assembles the stationary equilibrium for `p`.
///
/// Returns [`EquilibriumError::MonetaryCollapse`] for an active market whose
/// money growth exceeds the policy bound.
pub fn solve_steady_state<T: Scalar>(p: &ModelParams<T>) -> Result<SteadyState<T>, EquilibriumError> {
    let case = case_of(p);
    let fundamental = fundamental_price(p);
    let zero = T::zero();

    if !case.is_active() {
        let at_friedman = (p.mu - p.friedman_rule()).abs() <= T::tol(1e-12);
        return Ok(SteadyState {
            case,
            psi_star: fundamental,
            fundamental,
            z_star: zero,
            phi: zero,
            s_star: zero,
            p_star: None,
            p_star_real: None,
            q_star: zero,
            aggregate_q: zero,
            liquidity_premium: zero,
            welfare_trade_value: zero,
            welfare_surplus: zero,
            mu_bar: None,
            money_circulates: at_friedman,
            checks: None,
        });
    }

    let range = PolicyRange { mu_min: p.friedman_rule(), mu_bar: mu_bar_closed_form(p) };
    if !range.contains(p.mu) {
        return Err(EquilibriumError::MonetaryCollapse { mu: to_f64(p.mu), mu_bar: to_f64(range.mu_bar) });
    }

    let psi = psi_curve(p);
    let z = (psi + p.y_low) * p.asset_supply;
    let phi = z / p.money_stock;
    let today = Prices::new(psi, phi);
    let market = clear_market(p.asset_supply, p.money_stock, today, p)?;

    let tomorrow = Prices::new(psi, phi / (T::one() + p.mu));
    let g = gamma_coefficients(today, tomorrow, p)?;
    let gain = g.gamma3 * g.gamma4;
    let checks = EquilibriumChecks {
        knife_edge_residual: g.knife_edge_residual().abs() / gain,
        carry_costs: lemma2_check(today, tomorrow, p),
    };

    let mut ss = SteadyState {
        case,
        psi_star: psi,
        fundamental,
        z_star: z,
        phi,
        s_star: p.asset_supply,
        p_star: Some(market.p_star),
        p_star_real: Some(phi * market.p_star),
        q_star: market.q_star,
        aggregate_q: market.aggregate_q,
        liquidity_premium: psi - fundamental,
        welfare_trade_value: zero,
        welfare_surplus: zero,
        mu_bar: Some(range.mu_bar),
        money_circulates: true,
        checks: Some(checks),
    };
    let w = welfare(&ss, p);
    ss.welfare_trade_value = w.trade_value;
    ss.welfare_surplus = w.surplus;
    Ok(ss)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Welfare<T> {
    /// Goods value of all securities sold, `(lambda/2) A (psi + y_L)`.
    pub trade_value: T,
    /// Gain from moving securities from L- to H-types, `(lambda/2) A (y_H - y_L)`.
    pub surplus: T,
    /// Every L-type reaches the market.
    pub first_best: bool,
}

pub fn welfare<T: Scalar>(ss: &SteadyState<T>, p: &ModelParams<T>) -> Welfare<T> {
    if !ss.case.is_active() {
        return Welfare { trade_value: T::zero(), surplus: T::zero(), first_best: false };
    }
    let volume = T::half() * p.lambda * p.asset_supply;
    Welfare {
        trade_value: volume * (ss.psi_star + p.y_low),
        surplus: volume * (p.y_high - p.y_low),
        first_best: p.lambda == T::one(),
    }
}

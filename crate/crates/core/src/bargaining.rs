//! Bilateral Nash bargaining in the financial market.
//!
//! An L-type seller holding `s` securities meets an H-type buyer holding
//! `m` dollars. They split the gain from moving securities to the buyer with
//! seller weight `theta`. Because value functions are linear the Nash product
//! grows without bound along rays, so one of the holdings constraints binds.
//! Under this protocol the asset is always priced at its fundamental value.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::dfm::Prices;
use crate::error::DomainError;
use crate::investment::InvestmentChoice;
use crate::model::{derive_coefficients, fundamental_price, ModelParams, CASE_TOLERANCE};
use crate::scalar::{sign_with_tol, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvestorType {
    /// Draws the high return and buys.
    High,
    /// Draws the low return and sells.
    Low,
}

/// Which holdings constraints bind at the bargaining solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Binding {
    /// The buyer hands over all money.
    pub money: bool,
    /// The seller hands over all securities.
    pub securities: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BargainingOutcome<T> {
    /// Dollars from buyer to seller.
    pub d_m: T,
    /// Securities from seller to buyer.
    pub d_s: T,
    pub binding: Binding,
}

impl<T: Scalar> BargainingOutcome<T> {
    pub fn none() -> Self {
        BargainingOutcome { d_m: T::zero(), d_s: T::zero(), binding: Binding::default() }
    }

    /// `phi d_m - (psi + y_L) d_s`, goods.
    pub fn seller_surplus(&self, prices: Prices<T>, y_low: T) -> T {
        prices.phi * self.d_m - (prices.psi + y_low) * self.d_s
    }

    /// `(psi + y_H) d_s - phi d_m`, goods.
    pub fn buyer_surplus(&self, prices: Prices<T>, y_high: T) -> T {
        (prices.psi + y_high) * self.d_s - prices.phi * self.d_m
    }
}

/// `psi + theta y_H + (1 - theta) y_L`: goods a seller receives per security when securities bind.
fn seller_share_value<T: Scalar>(psi: T, p: &ModelParams<T>) -> T {
    psi + p.theta * p.y_high + (T::one() - p.theta) * p.y_low
}

/// `psi + (1 - theta) y_H + theta y_L`.
fn buyer_share_value<T: Scalar>(psi: T, p: &ModelParams<T>) -> T {
    psi + (T::one() - p.theta) * p.y_high + p.theta * p.y_low
}

fn check_inputs<T: Scalar>(money: T, securities: T, prices: Prices<T>, p: &ModelParams<T>) -> Result<(), DomainError> {
    if !(prices.phi > T::zero()) {
        return Err(DomainError::WorthlessMoney);
    }
    if money < T::zero() || securities < T::zero() {
        return Err(DomainError::NegativeInput("bargaining holdings"));
    }
    if prices.psi + p.y_low == T::zero() {
        return Err(DomainError::SingularBargain);
    }
    if p.y_high == p.y_low {
        return Err(DomainError::DegenerateSurplus);
    }
    Ok(())
}

/// Nash-bargaining transfers between a buyer with `buyer_money` dollars and a
/// seller with `seller_securities` securities.
pub fn nash_bargain<T: Scalar>(
    buyer_money: T,
    seller_securities: T,
    prices: Prices<T>,
    p: &ModelParams<T>,
) -> Result<BargainingOutcome<T>, DomainError> {
    check_inputs(buyer_money, seller_securities, prices, p)?;
    let Prices { psi, phi } = prices;
    let full_payment = seller_securities * seller_share_value(psi, p) / phi;
    let affordable = phi * buyer_money * buyer_share_value(psi, p) / ((psi + p.y_high) * (psi + p.y_low));
    Ok(BargainingOutcome {
        d_m: buyer_money.min(full_payment),
        d_s: seller_securities.min(affordable),
        binding: Binding { money: buyer_money <= full_payment, securities: seller_securities <= affordable },
    })
}

/// Trade in a meeting between two entrants; same-type pairs do not trade.
pub fn meeting_trade<T: Scalar>(
    first: InvestorType,
    second: InvestorType,
    money: T,
    securities: T,
    prices: Prices<T>,
    p: &ModelParams<T>,
) -> Result<Option<BargainingOutcome<T>>, DomainError> {
    if first == second {
        return Ok(None);
    }
    nash_bargain(money, securities, prices, p).map(Some)
}

/// Buyer money holdings between which both constraints bind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BargainingThresholds<T> {
    /// Below this the buyer's money binds alone.
    pub m_low: T,
    /// Above this the seller's securities bind alone.
    pub m_high: T,
}

pub fn bargaining_thresholds<T: Scalar>(
    securities: T,
    prices: Prices<T>,
    p: &ModelParams<T>,
) -> Result<BargainingThresholds<T>, DomainError> {
    check_inputs(T::zero(), securities, prices, p)?;
    let Prices { psi, phi } = prices;
    let scale = securities / phi;
    Ok(BargainingThresholds {
        m_low: scale * (psi + p.y_low) * (psi + p.y_high) / buyer_share_value(psi, p),
        m_high: scale * seller_share_value(psi, p),
    })
}

/// Comparison of the mean security return against `R - lambda theta (y_H - y_L)/4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReturnRegime {
    /// Securities are never issued.
    Bad,
    KnifeEdge,
    /// Securities are issued up to what a buyer can pay for.
    Good,
}

pub fn return_regime<T: Scalar>(p: &ModelParams<T>) -> ReturnRegime {
    let mean = T::half() * (p.y_high + p.y_low);
    let hurdle = p.dividend - p.lambda * p.theta * (p.y_high - p.y_low) / T::lit(4.0);
    match sign_with_tol(mean - hurdle, T::tol(CASE_TOLERANCE)) {
        Ordering::Less => ReturnRegime::Bad,
        Ordering::Equal => ReturnRegime::KnifeEdge,
        Ordering::Greater => ReturnRegime::Good,
    }
}

/// Optimal securitization when the market clears by bargaining, given the
/// money `representative_money` a counterparty buyer brings.
pub fn optimal_s_bargaining<T: Scalar>(
    representative_money: T,
    assets: T,
    prices: Prices<T>,
    p: &ModelParams<T>,
) -> Result<InvestmentChoice<T>, DomainError> {
    if !(prices.phi > T::zero()) {
        return Err(DomainError::WorthlessMoney);
    }
    if representative_money < T::zero() || assets < T::zero() {
        return Err(DomainError::NegativeInput("portfolio"));
    }
    let fundable = prices.phi * representative_money / seller_share_value(prices.psi, p);
    let capped = fundable.min(assets);
    Ok(match return_regime(p) {
        ReturnRegime::Bad => InvestmentChoice { lower: T::zero(), upper: T::zero() },
        ReturnRegime::KnifeEdge => InvestmentChoice { lower: T::zero(), upper: capped },
        ReturnRegime::Good => InvestmentChoice { lower: capped, upper: capped },
    })
}

/// Upper bound on money growth under bargaining:
/// `beta - 1 + (lambda/4)(1-theta)(y_H - y_L) / (beta R/(1-beta) + y_L)`.
pub fn mu_bar_bargaining<T: Scalar>(p: &ModelParams<T>) -> T {
    let quarter = T::lit(0.25);
    p.friedman_rule()
        + quarter * p.lambda * (T::one() - p.theta) * (p.y_high - p.y_low) / (fundamental_price(p) + p.y_low)
}

/// Coefficients of the next-period portfolio problem under bargaining,
/// `max -c1m m + c2m min{m, c3m} - c4m min{m, c5m}` and `max -c1a a + c2a min{a, c3a}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PortfolioCoefficients<T> {
    c1m: T,
    c2m: T,
    c3m: T,
    c4m: T,
    c5m: T,
    c1a: T,
    c2a: T,
    c3a: T,
}

/// Seller and buyer per-security valuations whose strict ordering rules out
/// any asset price other than the fundamental one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incompatibility<T> {
    /// `psi + theta y_H + (1-theta) y_L`.
    pub seller_side: T,
    /// `(psi + y_L)(psi + y_H) / (psi + (1-theta) y_H + theta y_L)`.
    pub buyer_side: T,
}

impl<T: Scalar> Incompatibility<T> {
    pub fn is_strict(&self) -> bool {
        self.seller_side > self.buyer_side
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BargainingEquilibrium<T> {
    pub regime: ReturnRegime,
    /// Always the fundamental value.
    pub psi_star: T,
    pub s_star: T,
    /// Real balances `phi M` implied by clearing; `None` when securities are not issued.
    pub real_balances: Option<T>,
    pub phi: T,
    /// Transfers in a mixed meeting at the steady state.
    pub transfers: Option<BargainingOutcome<T>>,
    pub incompatibility: Option<Incompatibility<T>>,
    pub mu_bar: Option<T>,
    /// Optimal money demand is positive at this `mu`.
    pub policy_admissible: bool,
    /// Money is valued only at the Friedman rule (bad returns).
    pub money_only_at_friedman: bool,
    coefficients: Option<PortfolioCoefficients<T>>,
}

impl<T: Scalar> BargainingEquilibrium<T> {
    /// Human-readable dump of the portfolio coefficients, for debugging.
    pub fn debug_report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "regime = {:?}", self.regime);
        if let Some(c) = &self.coefficients {
            for (k, v) in [
                ("c1m", c.c1m),
                ("c2m", c.c2m),
                ("c3m", c.c3m),
                ("c4m", c.c4m),
                ("c5m", c.c5m),
                ("c1a", c.c1a),
                ("c2a", c.c2a),
                ("c3a", c.c3a),
            ] {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }

    /// `c2m - c1m - c4m`: net marginal value of money; zero at the policy bound.
    pub fn money_margin(&self) -> Option<T> {
        self.coefficients.map(|c| c.c2m - c.c1m - c.c4m)
    }

    /// Net carrying cost of the asset, zero when it trades at its fundamental value.
    pub fn asset_carry_cost(&self) -> Option<T> {
        self.coefficients.map(|c| c.c1a)
    }
}

/// Steady state under bargaining. The asset price is assigned its
/// fundamental value in every regime.
pub fn solve_bargaining_equilibrium<T: Scalar>(p: &ModelParams<T>) -> BargainingEquilibrium<T> {
    let psi = fundamental_price(p);
    let regime = return_regime(p);
    let at_friedman = (p.mu - p.friedman_rule()).abs() <= T::tol(1e-12);

    if regime == ReturnRegime::Bad {
        return BargainingEquilibrium {
            regime,
            psi_star: psi,
            s_star: T::zero(),
            real_balances: None,
            phi: T::zero(),
            transfers: None,
            incompatibility: None,
            mu_bar: None,
            policy_admissible: at_friedman,
            money_only_at_friedman: true,
            coefficients: None,
        };
    }

    let one = T::one();
    let seller_side = seller_share_value(psi, p);
    let buyer_weighted = buyer_share_value(psi, p);
    let incompatibility =
        Incompatibility { seller_side, buyer_side: (psi + p.y_low) * (psi + p.y_high) / buyer_weighted };

    // Clearing: A = phi_next (m + mu M) [buyer_weighted] / ((psi + y_H)(psi + y_L)), and
    // phi_next (m + mu M) = phi M in a steady state.
    let z = p.asset_supply * (psi + p.y_high) * (psi + p.y_low) / buyer_weighted;
    let phi = z / p.money_stock;
    let prices = Prices::new(psi, phi);
    let s_star =
        optimal_s_bargaining(p.money_stock, p.asset_supply, prices, p).map(|c| c.selected()).unwrap_or(T::zero());
    let transfers = nash_bargain(p.money_stock, s_star, prices, p).ok();

    let phi_next = phi / (one + p.mu);
    let quarter = T::lit(0.25);
    let c = derive_coefficients(p);
    let mu_m = p.mu * p.money_stock;
    let coefficients = PortfolioCoefficients {
        c1m: phi - p.beta * phi_next,
        c2m: quarter * p.lambda * phi_next * buyer_weighted / (psi + p.y_low),
        c3m: (psi + p.y_high) * (psi + p.y_low) * s_star / (buyer_weighted * phi_next) - mu_m,
        c4m: quarter * p.lambda * phi_next,
        c5m: seller_side * s_star / phi_next - mu_m,
        c1a: psi - p.beta * (psi + p.dividend),
        c2a: c.alpha1 + quarter * p.lambda * p.theta * (p.y_high - p.y_low),
        c3a: z / seller_side,
    };
    let margin = coefficients.c2m - coefficients.c1m - coefficients.c4m;
    let policy_admissible = margin >= -T::tol(1e-12) * T::one().max(coefficients.c2m.abs());

    BargainingEquilibrium {
        regime,
        psi_star: psi,
        s_star,
        real_balances: Some(z),
        phi,
        transfers,
        incompatibility: Some(incompatibility),
        mu_bar: Some(mu_bar_bargaining(p)),
        policy_admissible,
        money_only_at_friedman: false,
        coefficients: Some(coefficients),
    }
}

//! Securitization choice in the investment market and next-period portfolio demand.

use std::cmp::Ordering;

use crate::dfm::Prices;
use crate::error::DomainError;
use crate::model::{derive_coefficients, ModelParams, CASE_TOLERANCE};
use crate::scalar::{sign_with_tol, Scalar};

/// Relative tolerance for `gamma1 + gamma2 gamma4 == gamma3 gamma4`.
pub const GAMMA_TOLERANCE: f64 = 1e-12;

/// Interval of optimal securitization `s*` within `[0, a]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvestmentChoice<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> InvestmentChoice<T> {
    fn point(s: T) -> Self {
        InvestmentChoice { lower: s, upper: s }
    }

    /// Maximal selection.
    pub fn selected(&self) -> T {
        self.upper
    }
}

/// Optimal `s*` for an agent entering the investment market with `(money, assets)`.
///
/// `alpha3 = phi m / (psi + y_L)` is the quantity a matched buyer can pay for
/// at the sellers' reservation price. When the risky security beats the safe
/// asset outright (`alpha1 > 0`) everything is securitized.
pub fn optimal_s<T: Scalar>(
    money: T,
    assets: T,
    prices: Prices<T>,
    p: &ModelParams<T>,
) -> Result<InvestmentChoice<T>, DomainError> {
    if !(prices.phi > T::zero()) {
        return Err(DomainError::WorthlessMoney);
    }
    if money < T::zero() || assets < T::zero() {
        return Err(DomainError::NegativeInput("portfolio"));
    }
    let low_value = prices.psi + p.y_low;
    let alpha3 = if low_value > T::zero() {
        prices.phi * money / low_value
    } else if money > T::zero() {
        T::infinity()
    } else {
        T::zero()
    };
    let capped = alpha3.min(assets);
    let c = derive_coefficients(p);
    let tol = T::tol(CASE_TOLERANCE);

    Ok(match (sign_with_tol(c.alpha_sum, tol), sign_with_tol(c.alpha1, tol)) {
        (Ordering::Less, _) => InvestmentChoice::point(T::zero()),
        (Ordering::Equal, _) => InvestmentChoice { lower: T::zero(), upper: capped },
        (Ordering::Greater, Ordering::Less) => InvestmentChoice::point(capped),
        (Ordering::Greater, Ordering::Equal) => InvestmentChoice { lower: capped, upper: assets },
        (Ordering::Greater, Ordering::Greater) => InvestmentChoice::point(assets),
    })
}

/// Coefficients of the linear next-period portfolio problem
/// `max -g1 m - g2 a + g3 min{a, g4 m + g5}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaCoefficients<T> {
    /// Cost of carrying one dollar, `phi - beta phi_next`.
    pub gamma1: T,
    /// Cost of carrying one asset, `psi - beta (R + psi_next)`.
    pub gamma2: T,
    /// `beta (alpha1 + alpha2)`.
    pub gamma3: T,
    /// Securities fundable per dollar tomorrow, `phi_next / (psi_next + y_L)`.
    pub gamma4: T,
    /// Securities fundable by the money injection, `phi_next mu M / (psi_next + y_L)`.
    pub gamma5: T,
    /// `gamma1 >= 0`; reported, not enforced.
    pub money_cost_nonnegative: bool,
    /// `gamma2 >= 0`; reported, not enforced.
    pub asset_cost_nonnegative: bool,
}

impl<T: Scalar> GammaCoefficients<T> {
    /// `gamma1 + gamma2 gamma4 - gamma3 gamma4`.
    pub fn knife_edge_residual(&self) -> T {
        self.gamma1 + self.gamma2 * self.gamma4 - self.gamma3 * self.gamma4
    }

    /// The same problem with its objective multiplied by `k`.
    ///
    /// `gamma4` and `gamma5` sit inside the `min` and are left alone.
    pub fn scaled(&self, k: T) -> Self {
        GammaCoefficients { gamma1: self.gamma1 * k, gamma2: self.gamma2 * k, gamma3: self.gamma3 * k, ..*self }
    }
}

pub fn gamma_coefficients<T: Scalar>(
    today: Prices<T>,
    tomorrow: Prices<T>,
    p: &ModelParams<T>,
) -> Result<GammaCoefficients<T>, DomainError> {
    if !(tomorrow.phi > T::zero()) {
        return Err(DomainError::WorthlessMoney);
    }
    let low_value = tomorrow.psi + p.y_low;
    if !(low_value > T::zero()) {
        return Err(DomainError::NonPositiveLowValuation);
    }
    let c = derive_coefficients(p);
    let gamma1 = today.phi - p.beta * tomorrow.phi;
    let gamma2 = today.psi - p.beta * (p.dividend + tomorrow.psi);
    let gamma4 = tomorrow.phi / low_value;
    let slack = T::tol(1e-12);
    Ok(GammaCoefficients {
        gamma1,
        gamma2,
        gamma3: p.beta * c.alpha_sum,
        gamma4,
        gamma5: gamma4 * p.mu * p.money_stock,
        money_cost_nonnegative: gamma1 >= -slack * T::one().max(today.phi),
        asset_cost_nonnegative: gamma2 >= -slack * T::one().max(today.psi),
    })
}

/// The line of optimal portfolios `(m, a) = (z, gamma4 z + gamma5)`, `z >= -gamma5/gamma4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortfolioLocus<T> {
    pub gamma4: T,
    pub gamma5: T,
}

impl<T: Scalar> PortfolioLocus<T> {
    pub fn min_money(&self) -> T {
        -self.gamma5 / self.gamma4
    }

    /// Portfolio at money holding `z`, or `None` outside the domain.
    pub fn at(&self, z: T) -> Option<(T, T)> {
        (z >= self.min_money()).then(|| (z, self.gamma4 * z + self.gamma5))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PortfolioChoice<T> {
    /// Carrying costs exceed the return: hold nothing.
    ZeroDemand,
    /// Returns exceed carrying costs: demand is unbounded.
    Unbounded,
    /// Indifference along a line; market clearing pins the point.
    KnifeEdgeLocus(PortfolioLocus<T>),
}

pub fn portfolio_choice<T: Scalar>(g: &GammaCoefficients<T>) -> PortfolioChoice<T> {
    let cost = g.gamma1 + g.gamma2 * g.gamma4;
    let gain = g.gamma3 * g.gamma4;
    let scale = gain.abs().max(cost.abs());
    match sign_with_tol(cost - gain, T::tol(GAMMA_TOLERANCE) * scale) {
        Ordering::Greater => PortfolioChoice::ZeroDemand,
        Ordering::Less => PortfolioChoice::Unbounded,
        Ordering::Equal => PortfolioChoice::KnifeEdgeLocus(PortfolioLocus { gamma4: g.gamma4, gamma5: g.gamma5 }),
    }
}

/// Non-negativity of carrying costs that any equilibrium satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CarryCostCheck {
    /// `psi >= beta (R + psi_next)`.
    pub asset_ok: bool,
    /// `phi >= beta phi_next`.
    pub money_ok: bool,
}

pub fn lemma2_check<T: Scalar>(today: Prices<T>, tomorrow: Prices<T>, p: &ModelParams<T>) -> CarryCostCheck {
    let slack = T::tol(1e-12);
    CarryCostCheck {
        asset_ok: today.psi >= p.beta * (p.dividend + tomorrow.psi) - slack,
        money_ok: today.phi >= p.beta * tomorrow.phi - slack,
    }
}

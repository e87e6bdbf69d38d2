//! Competitive clearing of the decentralized financial market.
//!
//! L-types sell securities for money and H-types buy them. Prices are in
//! dollars per security; `phi` converts dollars into goods.

use std::fmt;

use crate::error::DomainError;
use crate::model::ModelParams;
use crate::scalar::Scalar;

/// Relative tolerance that places a price or real balance on a branch boundary.
pub const BRANCH_TOLERANCE: f64 = 1e-12;

/// Centralized-market prices: `psi` for the real asset (goods), `phi` for money (goods per dollar).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prices<T> {
    pub psi: T,
    pub phi: T,
}

impl<T> Prices<T> {
    pub fn new(psi: T, phi: T) -> Self {
        Prices { psi, phi }
    }
}

/// Closed interval of optimal trade quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeCorrespondence<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> TradeCorrespondence<T> {
    pub fn point(q: T) -> Self {
        TradeCorrespondence { lower: q, upper: q }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    /// The maximal trade, used whenever a single quantity is needed.
    pub fn selected(&self) -> T {
        self.upper
    }

    pub fn contains(&self, q: T) -> bool {
        q >= self.lower && q <= self.upper
    }
}

fn on_boundary<T: Scalar>(price: T, threshold: T) -> bool {
    (price - threshold).abs() <= T::tol(BRANCH_TOLERANCE) * T::one().max(price.abs())
}

/// Seller (L-type) supply at dollar price `price` given `securities` held.
pub fn individual_supply<T: Scalar>(
    price: T,
    securities: T,
    prices: Prices<T>,
    y_low: T,
) -> Result<TradeCorrespondence<T>, DomainError> {
    if !(prices.phi > T::zero()) {
        return Err(DomainError::WorthlessMoney);
    }
    if securities < T::zero() || price < T::zero() || prices.psi < T::zero() {
        return Err(DomainError::NegativeInput("supply"));
    }
    let reservation = (prices.psi + y_low) / prices.phi;
    Ok(if on_boundary(price, reservation) {
        TradeCorrespondence { lower: T::zero(), upper: securities }
    } else if price < reservation {
        TradeCorrespondence::point(T::zero())
    } else {
        TradeCorrespondence::point(securities)
    })
}

/// Buyer (H-type) demand at dollar price `price` given `money` held.
pub fn individual_demand<T: Scalar>(
    price: T,
    money: T,
    prices: Prices<T>,
    y_high: T,
) -> Result<TradeCorrespondence<T>, DomainError> {
    if !(prices.phi > T::zero()) {
        return Err(DomainError::WorthlessMoney);
    }
    if money < T::zero() || price < T::zero() {
        return Err(DomainError::NegativeInput("demand"));
    }
    if price == T::zero() {
        return if money > T::zero() {
            Err(DomainError::UnboundedDemand)
        } else {
            Ok(TradeCorrespondence::point(T::zero()))
        };
    }
    let choke = (prices.psi + y_high) / prices.phi;
    let budget = money / price;
    Ok(if on_boundary(price, choke) {
        TradeCorrespondence { lower: T::zero(), upper: budget }
    } else if price > choke {
        TradeCorrespondence::point(T::zero())
    } else {
        TradeCorrespondence::point(budget)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Buyers' real balances cannot pay for all securities at the sellers' reservation price.
    MoneyConstrained,
    /// Price `m/s` lies between both reservation prices.
    Interior,
    /// Buyers could pay more than the securities are worth to them.
    AssetConstrained,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::MoneyConstrained => "MoneyConstrained",
            Regime::Interior => "Interior",
            Regime::AssetConstrained => "AssetConstrained",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfmOutcome<T> {
    /// Clearing price, dollars per security.
    pub p_star: T,
    /// Securities acquired by a matched buyer.
    pub q_star: T,
    /// Economy-wide volume `(lambda/2) q_star`.
    pub aggregate_q: T,
    pub regime: Regime,
}

/// Clears the market between a representative seller holding `securities`
/// and a representative buyer holding `money`.
pub fn clear_market<T: Scalar>(
    securities: T,
    money: T,
    prices: Prices<T>,
    p: &ModelParams<T>,
) -> Result<DfmOutcome<T>, DomainError> {
    let Prices { psi, phi } = prices;
    if !(phi > T::zero()) {
        return Err(DomainError::WorthlessMoney);
    }
    if securities < T::zero() || money < T::zero() {
        return Err(DomainError::NegativeInput("holdings"));
    }
    let real_balances = phi * money;
    let low_value = psi + p.y_low;
    let high_value = psi + p.y_high;
    let floor = low_value * securities;
    let cap = high_value * securities;
    let slack = T::tol(BRANCH_TOLERANCE) * T::one().max(real_balances.abs()).max(cap.abs());

    let regime = if real_balances < floor - slack {
        Regime::MoneyConstrained
    } else if real_balances > cap + slack {
        Regime::AssetConstrained
    } else {
        Regime::Interior
    };

    let p_star = match regime {
        Regime::MoneyConstrained => low_value / phi,
        Regime::AssetConstrained => high_value / phi,
        Regime::Interior if securities > T::zero() => money / securities,
        // s = m = 0: nothing trades; report the middle of the no-trade band
        Regime::Interior => T::half() * (low_value + high_value) / phi,
    };

    let q_star = if low_value > T::zero() {
        securities.min(real_balances / low_value)
    } else if real_balances > T::zero() {
        securities
    } else {
        T::zero()
    };

    Ok(DfmOutcome { p_star, q_star, aggregate_q: T::half() * p.lambda * q_star, regime })
}

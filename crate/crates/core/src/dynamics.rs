//! Off-steady-state paths of real balances and the asset price.
//!
//! Along any candidate equilibrium path real balances and the asset price are
//! tied by `z = (psi + y_L) A`, and real balances follow `z' = c + k z` with
//! `k = (2 + mu) / (2 beta) > 1`. Every path other than the fixed point explodes.

use crate::error::DomainError;
use crate::model::{case_of, derive_coefficients, ModelParams};
use crate::scalar::Scalar;

/// Default divergence threshold, as a multiple of `max(1, |z*|)`.
pub const DIVERGENCE_FACTOR: f64 = 1e6;
/// Pivots of the asset-price map smaller than this are treated as zero.
pub const SINGULAR_PIVOT: f64 = 1e-12;

/// `x' = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMap<T> {
    pub intercept: T,
    pub slope: T,
}

impl<T: Scalar> LinearMap<T> {
    pub fn apply(&self, x: T) -> T {
        self.intercept + self.slope * x
    }

    /// `c / (1 - k)`; `None` for a unit slope.
    pub fn fixed_point(&self) -> Option<T> {
        let denom = T::one() - self.slope;
        (denom != T::zero()).then(|| self.intercept / denom)
    }
}

/// Law of motion of real balances `z = phi M`.
pub fn real_balance_map<T: Scalar>(p: &ModelParams<T>) -> Result<LinearMap<T>, DomainError> {
    if !case_of(p).is_active() {
        return Err(DomainError::InactiveMarket);
    }
    let one = T::one();
    let two_beta = T::two() * p.beta;
    let c = derive_coefficients(p);
    let level = p.beta * (c.alpha_sum + p.dividend) + (one - p.beta) * p.y_low;
    Ok(LinearMap { intercept: -level * p.asset_supply / two_beta, slope: (T::two() + p.mu) / two_beta })
}

fn price_pivot<T: Scalar>(p: &ModelParams<T>) -> T {
    T::one() + p.mu - T::two() * p.beta
}

/// Next-period asset price implied by today's price under the knife-edge condition.
pub fn psi_step<T: Scalar>(psi: T, p: &ModelParams<T>) -> Result<T, DomainError> {
    if !case_of(p).is_active() {
        return Err(DomainError::InactiveMarket);
    }
    let pivot = price_pivot(p);
    if pivot.abs() < T::tol(SINGULAR_PIVOT) {
        return Err(DomainError::SingularPriceMap);
    }
    let level = p.beta * p.liquid_return() - (T::one() + p.mu - p.beta) * p.y_low;
    Ok((level - psi) / pivot)
}

/// Whether iterating [`psi_step`] pushes prices away from the fixed point,
/// i.e. `|1 + mu - 2 beta| < 1`.
///
/// Outside this region the price recursion alone does not show explosiveness;
/// the real-balance recursion still does.
pub fn psi_map_expands<T: Scalar>(p: &ModelParams<T>) -> bool {
    let pivot = price_pivot(p).abs();
    pivot >= T::tol(SINGULAR_PIVOT) && pivot < T::one()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState<T> {
    pub t: usize,
    /// Real balances, goods.
    pub z: T,
    /// Asset price consistent with `z`, goods.
    pub psi: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathFate {
    /// Started on the fixed point.
    Stationary,
    /// First period at which the distance to the fixed point crossed the threshold.
    DivergedAt(usize),
    /// Off the fixed point but still inside the threshold at the horizon.
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathReport<T> {
    pub fixed_point: T,
    pub states: Vec<PathState<T>>,
    pub fate: PathFate,
}

/// Iterates real balances from `z0` for `periods` steps.
///
/// `threshold_factor` scales `max(1, |z*|)` into the divergence threshold;
/// use [`DIVERGENCE_FACTOR`] for the default.
pub fn simulate_path<T: Scalar>(
    z0: T,
    periods: usize,
    map: &LinearMap<T>,
    p: &ModelParams<T>,
    threshold_factor: T,
) -> PathReport<T> {
    let fixed_point = map.fixed_point().unwrap_or(T::nan());
    let scale = T::one().max(fixed_point.abs());
    let threshold = threshold_factor * scale;
    let to_state = |t, z: T| PathState { t, z, psi: z / p.asset_supply - p.y_low };

    let stationary = (z0 - fixed_point).abs() <= T::tol(1e-12) * scale;
    let mut fate = if stationary { PathFate::Stationary } else { PathFate::Undecided };
    let mut states = Vec::with_capacity(periods + 1);
    let mut z = z0;
    states.push(to_state(0, z));
    for t in 1..=periods {
        z = map.apply(z);
        states.push(to_state(t, z));
        if fate == PathFate::Undecided && (z - fixed_point).abs() > threshold {
            fate = PathFate::DivergedAt(t);
        }
    }
    PathReport { fixed_point, states, fate }
}

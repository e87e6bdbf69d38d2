use std::fmt;

use thiserror::Error;

/// One violated parameter invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamViolation {
    /// Configuration key of the offending field (`beta`, `y_L`, ...).
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Every invariant a raw parameter record failed, in field order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationErrors(pub Vec<ParamViolation>);

impl ValidationErrors {
    pub fn fields(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.0.iter().map(|v| v.field)
    }

    pub fn contains(&self, field: &str) -> bool {
        self.0.iter().any(|v| v.field == field)
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// An operation was evaluated outside the region where its formula is defined.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("money has no value; supply undefined")]
    WorthlessMoney,
    #[error("unbounded demand at a zero price")]
    UnboundedDemand,
    #[error("negative holdings or price: {0}")]
    NegativeInput(&'static str),
    #[error("next-period asset price plus low return must be positive")]
    NonPositiveLowValuation,
    #[error("securities value psi + y_L is zero; bargaining transfer undefined")]
    SingularBargain,
    #[error("y_H equals y_L; no surplus to bargain over")]
    DegenerateSurplus,
    #[error("asset-price map is singular (1 + mu - 2 beta = 0)")]
    SingularPriceMap,
    #[error("requires trade in the financial market (alpha1 + alpha2 > 0)")]
    InactiveMarket,
}

/// No equilibrium object with the requested properties exists.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquilibriumError {
    #[error("monetary equilibrium collapses: mu = {mu} exceeds the policy bound {mu_bar}")]
    MonetaryCollapse { mu: f64, mu_bar: f64 },
    #[error("range degenerate or misbracketed: [{lo}, {hi}] has no sign change")]
    Misbracketed { lo: f64, hi: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimulationError {
    #[error("pairing undefined for an odd number of agents ({0})")]
    OddPopulation(usize),
    #[error("need at least two agents and one period")]
    EmptyRun,
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

//! Agent-level Monte Carlo of the financial market.
//!
//! Each period every agent is re-endowed with the steady-state portfolio,
//! draws a type, and enters the market with probability `lambda`. Entrants
//! either clear at the analytic price with pro-rata rationing of the long side
//! or are paired uniformly at random and bargain.
//!
//! Period `t` draws from a ChaCha8 stream keyed by `(seed, t)`, so periods
//! run in parallel and results do not depend on thread count.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bargaining::{nash_bargain, solve_bargaining_equilibrium, InvestorType};
use crate::dfm::{clear_market, individual_demand, Prices};
use crate::error::{DomainError, SimulationError};
use crate::model::ModelParams;
use crate::scalar::Scalar;
use crate::steady_state::solve_steady_state;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    PriceTaking,
    Bargaining,
}

impl Protocol {
    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::PriceTaking => "price_taking",
            Protocol::Bargaining => "bargaining",
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "price_taking" | "price-taking" => Ok(Protocol::PriceTaking),
            "bargaining" => Ok(Protocol::Bargaining),
            other => Err(format!("unknown protocol '{other}' (expected price_taking or bargaining)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState<T> {
    /// Dollars.
    pub money: T,
    /// Safe-asset units.
    pub assets: T,
    /// Security units.
    pub securities: T,
    pub kind: InvestorType,
    /// Entered the market this period.
    pub matched: bool,
}

/// Aggregates for one period, per agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodRecord<T> {
    pub period: usize,
    /// Securities traded per agent.
    pub q: T,
    /// Dollars per security.
    pub price: T,
    /// Gains from trade per agent, goods.
    pub surplus: T,
    /// Relative imbalance of money and securities transfers.
    pub conservation_error: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimStats<T> {
    pub protocol: Protocol,
    pub mean_q: T,
    /// Sample standard deviation over `sqrt(periods)`; zero for a single period.
    pub se_q: T,
    /// Dollars per security.
    pub mean_price: T,
    pub mean_surplus: T,
    pub se_surplus: T,
    pub periods: usize,
    pub agents: usize,
    pub seed: u64,
    pub max_conservation_error: T,
}

fn mean_and_se<T: Scalar>(xs: impl Iterator<Item = T> + Clone, n: usize) -> (T, T) {
    let nt = T::from_usize(n).unwrap();
    let mean = xs.clone().fold(T::zero(), |acc, x| acc + x) / nt;
    if n < 2 {
        return (mean, T::zero());
    }
    let ss = xs.fold(T::zero(), |acc, x| acc + (x - mean) * (x - mean));
    let sd = (ss / (nt - T::one())).sqrt();
    (mean, sd / nt.sqrt())
}

/// Portfolio and prices every agent starts a period with.
#[derive(Debug, Clone, Copy)]
struct Setup<T> {
    money: T,
    assets: T,
    securities: T,
    prices: Prices<T>,
    /// Dollars per security at which trades execute (price taking).
    price: T,
}

fn period_rng(seed: u64, period: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(period as u64);
    rng
}

fn draw_agents<T: Scalar>(rng: &mut ChaCha8Rng, n: usize, setup: &Setup<T>, lambda: f64) -> Vec<AgentState<T>> {
    (0..n)
        .map(|_| {
            let kind = if rng.random_bool(0.5) { InvestorType::High } else { InvestorType::Low };
            AgentState {
                money: setup.money,
                assets: setup.assets,
                securities: setup.securities,
                kind,
                matched: rng.random_bool(lambda),
            }
        })
        .collect()
}

fn relative_gap<T: Scalar>(out: T, inflow: T) -> T {
    let scale = out.abs().max(inflow.abs());
    if scale == T::zero() {
        T::zero()
    } else {
        (out - inflow).abs() / scale
    }
}

fn price_taking_period<T: Scalar>(
    agents: &[AgentState<T>],
    setup: &Setup<T>,
    p: &ModelParams<T>,
    period: usize,
) -> Result<PeriodRecord<T>, DomainError> {
    let price = setup.price;
    let offer = setup.securities;
    let bid = individual_demand(price, setup.money, setup.prices, p.y_high)?.selected();
    let entrants = |k| agents.iter().filter(|a| a.matched && a.kind == k).count();
    let (sellers, buyers) = (entrants(InvestorType::Low), entrants(InvestorType::High));
    let supply = T::from_usize(sellers).unwrap() * offer;
    let demand = T::from_usize(buyers).unwrap() * bid;
    let volume = supply.min(demand);
    let sell_ratio = if supply > T::zero() { volume / supply } else { T::zero() };
    let buy_ratio = if demand > T::zero() { volume / demand } else { T::zero() };

    let (mut sold, mut bought, mut paid, mut received) = (T::zero(), T::zero(), T::zero(), T::zero());
    let mut surplus = T::zero();
    for a in agents.iter().filter(|a| a.matched) {
        match a.kind {
            InvestorType::Low => {
                let units = (offer * sell_ratio).min(a.securities);
                sold = sold + units;
                received = received + price * units;
                surplus = surplus - p.y_low * units;
            }
            InvestorType::High => {
                let units = bid * buy_ratio;
                bought = bought + units;
                paid = paid + (price * units).min(a.money);
                surplus = surplus + p.y_high * units;
            }
        }
    }
    let n = T::from_usize(agents.len()).unwrap();
    Ok(PeriodRecord {
        period,
        q: sold / n,
        price,
        surplus: surplus / n,
        conservation_error: relative_gap(sold, bought).max(relative_gap(paid, received)),
    })
}

fn bargaining_period<T: Scalar>(
    rng: &mut ChaCha8Rng,
    agents: &[AgentState<T>],
    setup: &Setup<T>,
    p: &ModelParams<T>,
    period: usize,
) -> Result<PeriodRecord<T>, DomainError> {
    let mut entrants: Vec<usize> = (0..agents.len()).filter(|&i| agents[i].matched).collect();
    entrants.shuffle(rng);
    let (mut sold, mut bought, mut paid, mut received) = (T::zero(), T::zero(), T::zero(), T::zero());
    let mut surplus = T::zero();
    let mut price = T::zero();
    for pair in entrants.chunks_exact(2) {
        let (a, b) = (&agents[pair[0]], &agents[pair[1]]);
        if a.kind == b.kind {
            continue;
        }
        let (buyer, seller) = if a.kind == InvestorType::High { (a, b) } else { (b, a) };
        let deal = nash_bargain(buyer.money, seller.securities, setup.prices, p)?;
        sold = sold + deal.d_s;
        bought = bought + deal.d_s;
        paid = paid + deal.d_m;
        received = received + deal.d_m;
        surplus = surplus + (p.y_high - p.y_low) * deal.d_s;
        if deal.d_s > T::zero() {
            price = deal.d_m / deal.d_s;
        }
    }
    let n = T::from_usize(agents.len()).unwrap();
    Ok(PeriodRecord {
        period,
        q: sold / n,
        price,
        surplus: surplus / n,
        conservation_error: relative_gap(sold, bought).max(relative_gap(paid, received)),
    })
}

fn setup_for<T: Scalar>(p: &ModelParams<T>, protocol: Protocol) -> Result<Option<Setup<T>>, SimulationError> {
    match protocol {
        Protocol::PriceTaking => {
            if !crate::model::case_of(p).is_active() {
                return Err(DomainError::InactiveMarket.into());
            }
            let ss = solve_steady_state(p)?;
            let prices = Prices::new(ss.psi_star, ss.phi);
            let price = clear_market(ss.s_star, p.money_stock, prices, p)?.p_star;
            Ok(Some(Setup { money: p.money_stock, assets: p.asset_supply, securities: ss.s_star, prices, price }))
        }
        Protocol::Bargaining => {
            let eq = solve_bargaining_equilibrium(p);
            if eq.phi <= T::zero() {
                return Ok(None);
            }
            let prices = Prices::new(eq.psi_star, eq.phi);
            Ok(Some(Setup {
                money: p.money_stock,
                assets: p.asset_supply,
                securities: eq.s_star,
                prices,
                price: T::zero(),
            }))
        }
    }
}

/// Runs the simulation and returns the per-period records alongside the summary.
pub fn run_simulation_with_records<T: Scalar>(
    p: &ModelParams<T>,
    agents: usize,
    periods: usize,
    seed: u64,
    protocol: Protocol,
) -> Result<(SimStats<T>, Vec<PeriodRecord<T>>), SimulationError> {
    if agents < 2 || periods == 0 {
        return Err(SimulationError::EmptyRun);
    }
    if protocol == Protocol::Bargaining && agents % 2 == 1 {
        return Err(SimulationError::OddPopulation(agents));
    }
    let setup = setup_for(p, protocol)?;
    let lambda = p.lambda.to_f64().unwrap().clamp(0.0, 1.0);

    let records: Vec<PeriodRecord<T>> = (0..periods)
        .into_par_iter()
        .map(|t| {
            let Some(setup) = setup.as_ref() else {
                // Money is not valued, so nothing trades.
                return Ok(PeriodRecord {
                    period: t,
                    q: T::zero(),
                    price: T::zero(),
                    surplus: T::zero(),
                    conservation_error: T::zero(),
                });
            };
            let mut rng = period_rng(seed, t);
            let population = draw_agents(&mut rng, agents, setup, lambda);
            match protocol {
                Protocol::PriceTaking => price_taking_period(&population, setup, p, t),
                Protocol::Bargaining => bargaining_period(&mut rng, &population, setup, p, t),
            }
        })
        .collect::<Result<_, DomainError>>()?;

    let (mean_q, se_q) = mean_and_se(records.iter().map(|r| r.q), periods);
    let (mean_surplus, se_surplus) = mean_and_se(records.iter().map(|r| r.surplus), periods);
    let (mean_price, _) = mean_and_se(records.iter().map(|r| r.price), periods);
    let max_conservation_error = records.iter().fold(T::zero(), |acc, r| acc.max(r.conservation_error));
    let stats = SimStats {
        protocol,
        mean_q,
        se_q,
        mean_price,
        mean_surplus,
        se_surplus,
        periods,
        agents,
        seed,
        max_conservation_error,
    };
    Ok((stats, records))
}

pub fn run_simulation<T: Scalar>(
    p: &ModelParams<T>,
    agents: usize,
    periods: usize,
    seed: u64,
    protocol: Protocol,
) -> Result<SimStats<T>, SimulationError> {
    run_simulation_with_records(p, agents, periods, seed, protocol).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{canonical, params};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn no_entry_means_no_volume() {
        let p = params(|r| r.lambda = 0.0);
        // lambda = 0 leaves the market inactive under price taking.
        assert!(run_simulation(&p, 100, 5, 1, Protocol::PriceTaking).is_err());
        let s = run_simulation(&p, 100, 5, 1, Protocol::Bargaining).unwrap();
        assert_eq!(s.mean_q, 0.0);
        assert_eq!(s.se_q, 0.0);
    }

    #[test]
    fn odd_population_rejected_for_bargaining() {
        assert_eq!(
            run_simulation(&canonical(), 101, 5, 1, Protocol::Bargaining),
            Err(SimulationError::OddPopulation(101))
        );
        assert!(run_simulation(&canonical(), 101, 5, 1, Protocol::PriceTaking).is_ok());
    }

    #[test]
    fn empty_runs_rejected() {
        assert_eq!(run_simulation(&canonical(), 100, 0, 1, Protocol::PriceTaking), Err(SimulationError::EmptyRun));
        assert_eq!(run_simulation(&canonical(), 1, 10, 1, Protocol::PriceTaking), Err(SimulationError::EmptyRun));
    }

    #[test]
    fn collapse_is_reported() {
        let p = canonical().with_mu(0.2).unwrap();
        assert!(matches!(run_simulation(&p, 100, 5, 1, Protocol::PriceTaking), Err(SimulationError::Equilibrium(_))));
    }

    #[test]
    fn realized_price_is_analytic_price() {
        let p = canonical();
        let (stats, records) = run_simulation_with_records(&p, 1000, 20, 7, Protocol::PriceTaking).unwrap();
        let ss = solve_steady_state(&p).unwrap();
        for r in &records {
            assert_eq!(r.price, ss.p_star.unwrap());
        }
        assert_eq!(stats.mean_price, ss.p_star.unwrap());
    }

    #[test]
    fn full_entry_volume_near_half() {
        let stats = run_simulation(&canonical(), 20_000, 50, 3, Protocol::PriceTaking).unwrap();
        assert!((stats.mean_q - 0.5).abs() < 0.01, "{}", stats.mean_q);
        assert_relative_eq!(stats.mean_surplus, 3.0 * stats.mean_q, max_relative = 1e-12);
    }

    #[test]
    fn bargaining_volume_near_expectation() {
        let p = canonical();
        let eq = solve_bargaining_equilibrium(&p);
        let stats = run_simulation(&p, 20_000, 50, 3, Protocol::Bargaining).unwrap();
        // Half of the entrants' pairs are mixed.
        let expected = 0.25 * eq.s_star;
        assert!((stats.mean_q - expected).abs() < 0.01, "{} vs {expected}", stats.mean_q);
    }

    #[test]
    fn reproducible_across_calls() {
        let p = canonical();
        for protocol in [Protocol::PriceTaking, Protocol::Bargaining] {
            let a = run_simulation(&p, 2000, 30, 42, protocol).unwrap();
            let b = run_simulation(&p, 2000, 30, 42, protocol).unwrap();
            assert_eq!(a, b);
            let c = run_simulation(&p, 2000, 30, 43, protocol).unwrap();
            assert_ne!(a.mean_q, c.mean_q);
        }
    }

    #[test]
    fn protocol_round_trips_through_text() {
        for p in [Protocol::PriceTaking, Protocol::Bargaining] {
            assert_eq!(p.as_str().parse::<Protocol>().unwrap(), p);
        }
        assert!("auction".parse::<Protocol>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn transfers_conserved(lambda in 0.05..=1.0f64, seed in any::<u64>(), half in 1usize..200) {
            let p = params(|r| { r.lambda = lambda; r.mu = r.beta - 1.0; });
            prop_assume!(crate::model::case_of(&p).is_active());
            for protocol in [Protocol::PriceTaking, Protocol::Bargaining] {
                let s = run_simulation(&p, 2 * half, 5, seed, protocol).unwrap();
                prop_assert!(s.max_conservation_error <= 1e-9);
                prop_assert!(s.mean_q >= 0.0 && s.mean_q <= p.asset_supply);
            }
        }
    }
}

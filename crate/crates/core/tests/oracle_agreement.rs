use dfm_core::{
    clear_market, nash_bargain, run_simulation, solve_bargaining_equilibrium, ModelParams, Prices, Protocol, RawParams,
};
use dfm_oracles::counting::{expected_mixed_pairs, expected_short_side};
use dfm_oracles::nash::bargain_on_grid;
use dfm_oracles::walrasian::{clear_on_grid, MarketState};
use proptest::prelude::*;

fn params(y_low: f64, y_high: f64, theta: f64, lambda: f64) -> ModelParams<f64> {
    RawParams {
        beta: 0.9,
        dividend: 0.5 * y_high,
        y_low,
        y_high,
        lambda,
        theta,
        mu: 0.0,
        asset_supply: 1.0,
        money_stock: 1.0,
    }
    .validate()
    .unwrap()
    .params
}

fn canonical() -> ModelParams<f64> {
    RawParams { dividend: 1.0, ..params(0.0, 3.0, 0.5, 1.0).raw() }.validate().unwrap().params
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clearing_matches_grid(s in 0.1..2.0f64, m in 0.1..30.0f64, psi in 0.5..20.0f64, phi in 0.5..2.0f64,
                             y_low in 0.0..1.0f64, spread in 0.5..3.0f64) {
        let p = params(y_low, y_low + spread, 0.5, 1.0);
        let st = MarketState { securities: s, money: m, psi, phi, y_low, y_high: y_low + spread };
        let grid = clear_on_grid(&st, 1e-4).unwrap();
        let out = clear_market(s, m, Prices::new(psi, phi), &p).unwrap();
        prop_assert!((out.p_star - grid.price).abs() <= grid.step);
        prop_assert!((out.q_star - grid.quantity).abs() <= 1e-3);
    }

    #[test]
    fn bargain_matches_grid(m in 0.1..30.0f64, s in 0.1..3.0f64, psi in 0.5..20.0f64, phi in 0.2..3.0f64,
                            y_low in 0.0..1.0f64, spread in 0.5..3.0f64, theta in 0.05..0.95f64) {
        let p = params(y_low, y_low + spread, theta, 1.0);
        let grid = bargain_on_grid(m, s, psi, phi, y_low, y_low + spread, theta, 120);
        let out = nash_bargain(m, s, Prices::new(psi, phi), &p).unwrap();
        prop_assert!((out.d_m - grid.d_m).abs() <= grid.step_m);
        prop_assert!((out.d_s - grid.d_s).abs() <= grid.step_s);
    }
}

/// With pro-rata rationing the finite-population volume is `E[min(L, H)] A / N`,
/// slightly below the continuum value.
#[test]
fn price_taking_volume_matches_finite_population_expectation() {
    const N: usize = 2_000;
    const T: usize = 400;
    for lambda in [0.5, 1.0] {
        let p = canonical().with_lambda(lambda).unwrap();
        let stats = run_simulation(&p, N, T, 11, Protocol::PriceTaking).unwrap();
        let expected = expected_short_side(N as u64, lambda) / N as f64;
        let z = (stats.mean_q - expected) / stats.se_q;
        assert!(z.abs() < 4.0, "lambda={lambda}: {} vs {expected} (z={z})", stats.mean_q);
        assert!(expected < 0.5 * lambda);
    }
}

#[test]
fn bargaining_volume_matches_pairing_expectation() {
    const N: usize = 2_000;
    const T: usize = 400;
    let p = canonical();
    let d_s = solve_bargaining_equilibrium(&p).transfers.unwrap().d_s;
    let stats = run_simulation(&p, N, T, 12, Protocol::Bargaining).unwrap();
    let expected = expected_mixed_pairs(N as u64, p.lambda) * d_s / N as f64;
    let z = (stats.mean_q - expected) / stats.se_q;
    assert!(z.abs() < 4.0, "{} vs {expected} (z={z})", stats.mean_q);
}

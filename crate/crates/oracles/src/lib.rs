//! Brute-force reference computations.
//!
//! Nothing here shares code with `dfm-core`: each routine works from the
//! primitive preferences (or plain counting) so it can referee the closed forms.

pub mod walrasian {
    /// Grid-search clearing of the financial market.
    ///
    /// A seller with `s` securities values each at `psi + y_low` goods and a
    /// buyer with `m` dollars values each at `psi + y_high`; a dollar is worth
    /// `phi` goods. Prices within half a step of a reservation price are treated
    /// as that price, where the trader is indifferent.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct GridClearing {
        /// Dollars per security.
        pub price: f64,
        /// Securities per seller.
        pub quantity: f64,
        pub step: f64,
    }

    #[derive(Debug, Clone, Copy)]
    pub struct MarketState {
        pub securities: f64,
        pub money: f64,
        pub psi: f64,
        pub phi: f64,
        pub y_low: f64,
        pub y_high: f64,
    }

    fn supply_band(price: f64, st: &MarketState, half: f64) -> (f64, f64) {
        let reserve = (st.psi + st.y_low) / st.phi;
        if (price - reserve).abs() <= half {
            (0.0, st.securities)
        } else if price > reserve {
            (st.securities, st.securities)
        } else {
            (0.0, 0.0)
        }
    }

    fn demand_band(price: f64, st: &MarketState, half: f64) -> (f64, f64) {
        let reserve = (st.psi + st.y_high) / st.phi;
        let budget = st.money / price;
        if (price - reserve).abs() <= half {
            (0.0, budget)
        } else if price < reserve {
            (budget, budget)
        } else {
            (0.0, 0.0)
        }
    }

    /// Lowest grid price at which excess demand is no longer strictly positive.
    pub fn clear_on_grid(st: &MarketState, step: f64) -> Option<GridClearing> {
        let lo = (st.psi + st.y_low) / st.phi * (1.0 - 1e-3);
        let hi = (st.psi + st.y_high) / st.phi * (1.0 + 1e-3);
        let half = 0.5 * step;
        let n = ((hi - lo) / step).ceil() as usize;
        (0..=n).map(|k| lo + k as f64 * step).find_map(|price| {
            let (_, s_hi) = supply_band(price, st, half);
            let (d_lo, d_hi) = demand_band(price, st, half);
            // Excess demand falls with the price; stop where it can first be zero or negative.
            (d_lo <= s_hi).then(|| GridClearing { price, quantity: d_hi.min(s_hi), step })
        })
    }
}

pub mod nash {
    /// Grid maximizer of the Nash product
    /// `(phi dm - (psi + y_L) ds)^theta ((psi + y_H) ds - phi dm)^(1 - theta)`
    /// with both surpluses positive.
    ///
    /// The grid spans the individually rational box: a buyer never pays more
    /// than all `s` securities are worth to them, `(psi + y_H) s / phi`, and a
    /// seller never gives more than the buyer's money can compensate,
    /// `phi m / (psi + y_L)`. Spanning the full `[0, m] x [0, s]` instead leaves
    /// only a handful of grid points inside the trading cone when holdings are
    /// mismatched.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct GridBargain {
        pub d_m: f64,
        pub d_s: f64,
        pub step_m: f64,
        pub step_s: f64,
    }

    #[allow(clippy::too_many_arguments)]
    pub fn bargain_on_grid(
        m: f64,
        s: f64,
        psi: f64,
        phi: f64,
        y_low: f64,
        y_high: f64,
        theta: f64,
        points: usize,
    ) -> GridBargain {
        let m_cap = m.min((psi + y_high) * s / phi);
        let s_cap = if psi + y_low > 0.0 { s.min(phi * m / (psi + y_low)) } else { s };
        let step_m = m_cap / (points - 1) as f64;
        let step_s = s_cap / (points - 1) as f64;
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..points {
            let dm = i as f64 * step_m;
            for j in 0..points {
                let ds = j as f64 * step_s;
                let seller = phi * dm - (psi + y_low) * ds;
                let buyer = (psi + y_high) * ds - phi * dm;
                if seller <= 0.0 || buyer <= 0.0 {
                    continue;
                }
                let value = theta * seller.ln() + (1.0 - theta) * buyer.ln();
                if value > best.0 {
                    best = (value, dm, ds);
                }
            }
        }
        GridBargain { d_m: best.1, d_s: best.2, step_m, step_s }
    }
}

pub mod counting {
    use statrs::function::gamma::ln_gamma;

    fn ln_choose(n: u64, k: u64) -> f64 {
        ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
    }

    fn binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
        if p == 0.0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        if p == 1.0 {
            return if k == n { 1.0 } else { 0.0 };
        }
        (ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
    }

    /// `E|X - n/2|` for `X ~ Bin(n, 1/2)`, by de Moivre's closed form.
    pub fn half_binomial_mean_abs_deviation(n: u64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let k = n / 2;
        // 2 (1/2)^(n+1) (k + 1) C(n, k + 1)
        (k + 1) as f64 * (ln_choose(n, k + 1) - n as f64 * std::f64::consts::LN_2).exp()
    }

    /// `E[min(L, H)]` where each of `n` agents independently enters with
    /// probability `lambda` and is L or H with equal odds.
    pub fn expected_short_side(n: u64, lambda: f64) -> f64 {
        (0..=n)
            .map(|e| {
                let w = binomial_pmf(n, e, lambda);
                if w < 1e-300 {
                    0.0
                } else {
                    w * (0.5 * e as f64 - half_binomial_mean_abs_deviation(e))
                }
            })
            .sum()
    }

    /// Same quantity by enumerating all `3^n` outcomes; only for small `n`.
    pub fn expected_short_side_brute(n: u32, lambda: f64) -> f64 {
        let probs = [1.0 - lambda, 0.5 * lambda, 0.5 * lambda];
        let mut total = 0.0;
        for code in 0..3u64.pow(n) {
            let (mut c, mut weight, mut low, mut high) = (code, 1.0, 0u32, 0u32);
            for _ in 0..n {
                let d = (c % 3) as usize;
                c /= 3;
                weight *= probs[d];
                match d {
                    1 => low += 1,
                    2 => high += 1,
                    _ => {}
                }
            }
            total += weight * low.min(high) as f64;
        }
        total
    }

    /// Expected number of L/H pairs when entrants are paired at random.
    pub fn expected_mixed_pairs(n: u64, lambda: f64) -> f64 {
        let odd = 0.5 * (1.0 - (1.0 - 2.0 * lambda).powi(n as i32));
        0.25 * (n as f64 * lambda - odd)
    }

    /// Same quantity by enumeration over entrant counts and pairings.
    pub fn expected_mixed_pairs_brute(n: u32, lambda: f64) -> f64 {
        (0..=n as u64).map(|e| binomial_pmf(n as u64, e, lambda) * (e / 2) as f64 * 0.5).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::counting::*;
    use super::nash::bargain_on_grid;
    use super::walrasian::{clear_on_grid, MarketState};

    #[test]
    fn short_side_closed_form_matches_enumeration() {
        for n in 1..=8 {
            for lambda in [0.0, 0.3, 0.8, 1.0] {
                let a = expected_short_side(n as u64, lambda);
                let b = expected_short_side_brute(n, lambda);
                assert!((a - b).abs() < 1e-12, "n={n} lambda={lambda}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn mixed_pairs_closed_form_matches_enumeration() {
        for n in 2..=12 {
            for lambda in [0.1, 0.5, 1.0] {
                let a = expected_mixed_pairs(n as u64, lambda);
                let b = expected_mixed_pairs_brute(n, lambda);
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mean_abs_deviation_small_cases() {
        // Bin(2, 1/2): |0-1|/4 + 0 + |2-1|/4
        assert!((half_binomial_mean_abs_deviation(2) - 0.5).abs() < 1e-14);
        // Bin(3, 1/2): (1.5 + 3*0.5 + 3*0.5 + 1.5)/8
        assert!((half_binomial_mean_abs_deviation(3) - 0.75).abs() < 1e-14);
    }

    #[test]
    fn grid_clearing_money_short() {
        let st = MarketState { securities: 1.0, money: 5.0, psi: 9.0, phi: 1.0, y_low: 0.0, y_high: 3.0 };
        let g = clear_on_grid(&st, 1e-4).unwrap();
        assert!((g.price - 9.0).abs() <= g.step);
        assert!((g.quantity - 5.0 / 9.0).abs() < 1e-3);
    }

    #[test]
    fn grid_bargain_canonical() {
        let g = bargain_on_grid(5.0, 1.0, 9.0, 1.0, 0.0, 3.0, 0.5, 200);
        assert!((g.d_m - 5.0).abs() <= g.step_m);
        assert!((g.d_s - 52.5 / 108.0).abs() <= g.step_s);
    }
}

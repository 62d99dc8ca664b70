//! High-frequency traders: event-time activation on price swings, random
//! side choice, volume-absorbing order sizing under position limits,
//! near-best-quote pricing and profit accounting.

use rand::Rng;
use rand_distr::{Distribution, Poisson, Uniform};
use serde::{Deserialize, Serialize};

use crate::book::{LimitOrderBook, Side, Ticks};
use crate::config::Config;

/// Parameters driving the HF population, extracted from the [`Config`].
#[derive(Debug, Clone, Copy)]
pub struct HfParams {
    pub eta_min: f64,
    pub eta_max: f64,
    pub lambda: f64,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub gamma_h: u32,
    pub n_h: u32,
    pub position_cap: i64,
    pub book_fraction_cap: f64,
    pub tick_size: f64,
}

impl From<&Config> for HfParams {
    fn from(c: &Config) -> Self {
        HfParams {
            eta_min: c.eta_min,
            eta_max: c.eta_max,
            lambda: c.lambda,
            kappa_min: c.kappa_min,
            kappa_max: c.kappa_max,
            gamma_h: c.gamma_h,
            n_h: c.n_h,
            position_cap: c.position_cap,
            book_fraction_cap: c.book_fraction_cap,
            tick_size: c.tick_size,
        }
    }
}

/// One high-frequency trader.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HfTrader {
    pub id: u32,
    /// Personal activation threshold, drawn once from Uniform[eta_min, eta_max].
    pub delta_x: f64,
    /// Net inventory in asset units, bounded by the position cap.
    pub net_position: i64,
}

pub fn sample_threshold<R: Rng>(params: &HfParams, rng: &mut R) -> f64 {
    Uniform::new_inclusive(params.eta_min, params.eta_max).sample(rng)
}

/// Event-time activation: the relative move of the last two closes
/// exceeds the trader's threshold.
pub fn hf_is_active(delta_x: f64, prev_close: f64, prev_close2: f64) -> bool {
    ((prev_close - prev_close2) / prev_close2).abs() > delta_x
}

/// Buy or sell with equal probability.
pub fn hf_side<R: Rng>(rng: &mut R) -> Side {
    if rng.gen_bool(0.5) {
        Side::Buy
    } else {
        Side::Sell
    }
}

/// Order size: Poisson with mean `lambda * V` where `V` is the volume on
/// the opposite side of the book, clamped to the book-fraction cap and to
/// the remaining position headroom (worst-case full execution). A result
/// of 0 means no order. `V = 0` consumes no randomness.
pub fn hf_order_size<R: Rng>(
    side: Side,
    book: &LimitOrderBook,
    trader: &HfTrader,
    params: &HfParams,
    rng: &mut R,
) -> u64 {
    let v = book.side_volume(side.opposite(), None);
    if v == 0 {
        return 0;
    }
    let mean = params.lambda * v as f64;
    let draw = Poisson::new(mean).expect("positive mean").sample(rng) as u64;
    let fraction_cap = (v as f64 * params.book_fraction_cap).floor() as u64;
    let headroom = match side {
        Side::Buy => params.position_cap - trader.net_position,
        Side::Sell => params.position_cap + trader.net_position,
    }
    .max(0) as u64;
    draw.min(fraction_cap).min(headroom)
}

/// Limit price near the relevant best quote: buys at `ask * (1 + kappa)`,
/// sells at `bid * (1 - kappa)`, rounded to the tick. Absent when the
/// needed quote is missing (the trader skips the session).
pub fn hf_limit_price<R: Rng>(
    side: Side,
    book: &LimitOrderBook,
    params: &HfParams,
    rng: &mut R,
) -> Option<Ticks> {
    let quote = match side {
        Side::Buy => book.best_ask()?,
        Side::Sell => book.best_bid()?,
    };
    let kappa = Uniform::new_inclusive(params.kappa_min, params.kappa_max).sample(rng);
    let factor = match side {
        Side::Buy => 1.0 + kappa,
        Side::Sell => 1.0 - kappa,
    };
    Some(((quote as f64 * factor).round() as Ticks).max(1))
}

/// Session profit on the submitted order, size signed (+buy / -sell).
pub fn hf_profit(close: f64, limit_price: f64, size_signed: f64) -> f64 {
    (close - limit_price) * size_signed
}

/// Execution bookkeeping after session matching.
pub fn update_position(trader: &mut HfTrader, executed_buys: u64, executed_sells: u64) {
    trader.net_position += executed_buys as i64 - executed_sells as i64;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::book::{AgentClass, Order};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> HfParams {
        HfParams::from(&Config::default())
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn trader(pos: i64) -> HfTrader {
        HfTrader { id: 0, delta_x: 0.05, net_position: pos }
    }

    fn ask(id: u64, size: u64, price: Ticks) -> Order {
        Order {
            id,
            side: Side::Sell,
            size,
            price,
            owner_class: AgentClass::Lf,
            owner_id: id as u32,
            placed_at: 0,
            expires_after: 100,
        }
    }

    #[test]
    fn activation_threshold() {
        // 25% move exceeds the whole support [0, 0.2].
        assert!(hf_is_active(0.2, 125.0, 100.0));
        assert!(hf_is_active(0.0001, 125.0, 100.0));
        // flat prices activate nobody with a positive threshold
        assert!(!hf_is_active(1e-9, 100.0, 100.0));
        // downward moves count through the absolute value
        assert!(hf_is_active(0.05, 90.0, 100.0));
    }

    #[test]
    fn activation_is_monotone_in_threshold() {
        let mut r = rng(2);
        for _ in 0..1_000 {
            let move_ = r.gen::<f64>() * 0.3;
            let hi = r.gen::<f64>() * 0.2;
            let lo = hi * r.gen::<f64>();
            if hf_is_active(hi, 100.0 * (1.0 + move_), 100.0) {
                assert!(hf_is_active(lo, 100.0 * (1.0 + move_), 100.0));
            }
        }
    }

    #[test]
    fn active_fraction_matches_uniform_cdf() {
        let p = params();
        let mut r = rng(3);
        let n = 100_000;
        // 10% move: P(delta_x < 0.10) = 0.5 on Uniform[0, 0.2].
        let active = (0..n)
            .filter(|_| hf_is_active(sample_threshold(&p, &mut r), 110.0, 100.0))
            .count();
        let freq = active as f64 / n as f64;
        let se = (0.25f64 / n as f64).sqrt();
        assert!((freq - 0.5).abs() < 4.0 * se, "freq = {freq}");
    }

    #[test]
    fn side_is_fair_and_independent() {
        let mut r = rng(5);
        let n = 100_000;
        let buys = (0..n).filter(|_| hf_side(&mut r) == Side::Buy).count();
        let freq = buys as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.005, "freq = {freq}");

        // paired draws: sample correlation near zero
        let pairs: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let a = if hf_side(&mut r) == Side::Buy { 1.0 } else { 0.0 };
                let b = if hf_side(&mut r) == Side::Buy { 1.0 } else { 0.0 };
                (a, b)
            })
            .collect();
        let ma = pairs.iter().map(|p| p.0).sum::<f64>() / n as f64;
        let mb = pairs.iter().map(|p| p.1).sum::<f64>() / n as f64;
        let cov = pairs.iter().map(|p| (p.0 - ma) * (p.1 - mb)).sum::<f64>() / n as f64;
        let corr = cov / (ma * (1.0 - ma) * mb * (1.0 - mb)).sqrt();
        assert!(corr.abs() < 3.0 / (n as f64).sqrt() * 1.5, "corr = {corr}");
    }

    #[test]
    fn seeded_side_stream_replays_identically() {
        let seq1: Vec<Side> = (0..100).map(|_| hf_side(&mut rng(7))).collect();
        let seq2: Vec<Side> = (0..100).map(|_| hf_side(&mut rng(7))).collect();
        assert_eq!(seq1, seq2);
    }

    #[test]
    fn size_zero_on_empty_opposite_side() {
        let book = LimitOrderBook::new();
        let p = params();
        assert_eq!(hf_order_size(Side::Buy, &book, &trader(0), &p, &mut rng(1)), 0);
    }

    #[test]
    fn size_clamped_to_quarter_of_book() {
        let mut book = LimitOrderBook::new();
        book.insert_order(ask(1, 1_000, 10_000)).unwrap();
        let mut p = params();
        // push the Poisson mean far above the cap so the clamp always binds
        p.lambda = 0.9;
        p.position_cap = 1_000_000;
        let mut r = rng(11);
        for _ in 0..50 {
            let s = hf_order_size(Side::Buy, &book, &trader(0), &p, &mut r);
            assert!(s <= 250, "s = {s}");
        }
    }

    #[test]
    fn size_clamped_to_position_headroom() {
        let mut book = LimitOrderBook::new();
        book.insert_order(ask(1, 1_000, 10_000)).unwrap();
        let p = params();
        let mut r = rng(13);
        // buy headroom of 10
        let s = hf_order_size(Side::Buy, &book, &trader(2_990), &p, &mut r);
        assert!(s <= 10);
        // sell headroom of 0 at the negative cap
        let s = hf_order_size(Side::Sell, &book, &trader(-3_000), &p, &mut r);
        assert_eq!(s, 0);
    }

    #[test]
    fn size_respects_both_caps_on_random_inputs() {
        let p = params();
        let mut r = rng(17);
        for _ in 0..500 {
            let v = 1 + r.gen::<u64>() % 20_000;
            let pos = (r.gen::<i64>() % (2 * p.position_cap + 1)).clamp(-p.position_cap, p.position_cap);
            let mut book = LimitOrderBook::new();
            book.insert_order(ask(1, v, 10_000)).unwrap();
            let side = hf_side(&mut r);
            let s = hf_order_size(side, &book, &trader(pos), &p, &mut r);
            assert!(s <= v / 4);
            let headroom = match side {
                Side::Buy => p.position_cap - pos,
                Side::Sell => p.position_cap + pos,
            };
            assert!(s as i64 <= headroom);
        }
    }

    #[test]
    fn limit_price_near_best_quote() {
        let mut book = LimitOrderBook::new();
        book.insert_order(ask(1, 10, 10_000)).unwrap();
        let mut p = params();
        // kappa pinned at 0.005
        p.kappa_min = 0.005;
        p.kappa_max = 0.005;
        let price = hf_limit_price(Side::Buy, &book, &p, &mut rng(1)).unwrap();
        assert_eq!(price, 10_050); // 100.50
        // kappa = 0: marketable at exactly the best ask
        p.kappa_min = 0.0;
        p.kappa_max = 0.0;
        assert_eq!(hf_limit_price(Side::Buy, &book, &p, &mut rng(1)), Some(10_000));
    }

    #[test]
    fn limit_price_offsets_have_the_right_sign() {
        let mut book = LimitOrderBook::new();
        book.insert_order(ask(1, 10, 10_000)).unwrap();
        let mut bid = ask(2, 10, 9_900);
        bid.side = Side::Buy;
        book.insert_order(bid).unwrap();
        let p = params();
        let mut r = rng(19);
        for _ in 0..500 {
            assert!(hf_limit_price(Side::Buy, &book, &p, &mut r).unwrap() >= 10_000);
            assert!(hf_limit_price(Side::Sell, &book, &p, &mut r).unwrap() <= 9_900);
        }
    }

    #[test]
    fn missing_quote_skips_pricing() {
        let book = LimitOrderBook::new();
        let p = params();
        assert_eq!(hf_limit_price(Side::Buy, &book, &p, &mut rng(1)), None);
        assert_eq!(hf_limit_price(Side::Sell, &book, &p, &mut rng(1)), None);
    }

    #[test]
    fn profit_examples() {
        assert_abs_diff_eq!(hf_profit(101.0, 100.0, 200.0), 200.0);
        assert_abs_diff_eq!(hf_profit(100.0, 100.0, -500.0), 0.0);
        // sell above the close gains
        assert!(hf_profit(99.0, 100.0, -200.0) > 0.0);
    }

    #[test]
    fn position_bookkeeping() {
        let mut t = trader(0);
        update_position(&mut t, 40, 0);
        assert_eq!(t.net_position, 40);
        update_position(&mut t, 0, 15);
        assert_eq!(t.net_position, 25);
    }

    /// Among n active traders the seller count is Binomial(n, 0.5); chi-square
    /// goodness of fit at the 1% level for n = 4 over 1e5 sessions.
    #[test]
    fn seller_count_is_binomial() {
        let mut r = rng(23);
        let sessions = 100_000usize;
        let n = 4usize;
        let mut counts = [0u64; 5];
        for _ in 0..sessions {
            let sellers = (0..n).filter(|_| hf_side(&mut r) == Side::Sell).count();
            counts[sellers] += 1;
        }
        let binom = [1.0, 4.0, 6.0, 4.0, 1.0];
        let chi2: f64 = counts
            .iter()
            .zip(binom.iter())
            .map(|(&obs, &c)| {
                let expect = sessions as f64 * c / 16.0;
                (obs as f64 - expect).powi(2) / expect
            })
            .sum();
        // chi-square critical value, 4 degrees of freedom, 1% level
        assert!(chi2 < 13.2767, "chi2 = {chi2}, counts = {counts:?}");
    }
}

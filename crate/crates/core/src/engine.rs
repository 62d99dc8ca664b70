//! Session orchestration: the five-step trading timeline, full seeded
//! runs and Monte-Carlo batches.
//!
//! Each run consumes a single ChaCha stream in a fixed documented order
//! per session: fundamental shock, LF draws in id order, HF permutation,
//! HF draws in permuted order, then LF switching draws in id order. This
//! makes (config, seed) -> RunRecord a pure function regardless of the
//! thread count used for the batch.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::book::{AgentClass, LimitOrderBook, Order, OrderId, Side, Trade};
use crate::config::{Config, ConfigError};
use crate::hf::{self, HfParams, HfTrader};
use crate::lf::{self, FundamentalTrack, LfParams, LfSubmission, LfTrader, Strategy};

/// Full market state for one simulation run.
#[derive(Debug, Clone)]
pub struct MarketState {
    pub session: u32,
    /// Closing prices of completed sessions.
    pub closing_prices: Vec<f64>,
    pub fundamental: FundamentalTrack,
    pub book: LimitOrderBook,
    pub lf_population: Vec<LfTrader>,
    pub hf_population: Vec<HfTrader>,
    lf_params: LfParams,
    hf_params: HfParams,
    initial_price: f64,
    next_order_id: OrderId,
}

/// Per-session time series entry; the analytics input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub session: u32,
    pub close: f64,
    pub fundamental: f64,
    /// Spread after LF submissions, before HF trading and matching.
    pub spread_pre_match: Option<f64>,
    /// Spread after matching, before end-of-session expiry.
    pub spread_end: Option<f64>,
    pub lf_buy_vol: u64,
    pub lf_sell_vol: u64,
    pub hf_buy_vol: u64,
    pub hf_sell_vol: u64,
    pub lf_exec_vol: u64,
    pub hf_exec_vol: u64,
    pub n_trades: u32,
}

impl SessionRecord {
    pub fn submitted_volume(&self, class: Option<AgentClass>) -> u64 {
        match class {
            None => self.lf_buy_vol + self.lf_sell_vol + self.hf_buy_vol + self.hf_sell_vol,
            Some(AgentClass::Lf) => self.lf_buy_vol + self.lf_sell_vol,
            Some(AgentClass::Hf) => self.hf_buy_vol + self.hf_sell_vol,
        }
    }
}

/// Final population summary embedded in the run sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSummary {
    pub n_lf: u32,
    pub n_hf: u32,
    pub chartist_share_final: f64,
    pub mean_theta: f64,
    pub mean_activation_threshold: f64,
    pub max_abs_hf_position: i64,
    pub hf_order_count: u64,
    pub hf_profit_mean: f64,
}

/// Everything one seeded run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub scenario: String,
    pub sessions: Vec<SessionRecord>,
    pub summary: PopulationSummary,
    /// Pooled per-order HF profits over the whole run.
    pub hf_profits: Vec<f64>,
}

impl RunRecord {
    pub fn closes(&self) -> Vec<f64> {
        self.sessions.iter().map(|s| s.close).collect()
    }
}

/// Draws the trader populations and seeds the price/fundamental tracks.
pub fn init_state(config: &Config, rng: &mut ChaCha8Rng) -> Result<MarketState, ConfigError> {
    let issues = config.validate();
    if !issues.is_empty() {
        return Err(ConfigError { issues });
    }
    let lf_params = LfParams::from(config);
    let hf_params = HfParams::from(config);
    let lf_population = (0..config.n_l)
        .map(|id| LfTrader {
            id,
            theta_i: lf::sample_theta(&lf_params, rng),
            strategy: if rng.gen_bool(0.5) { Strategy::Chartist } else { Strategy::Fundamentalist },
            next_active_at: 0,
            last: None,
        })
        .collect();
    let hf_population = (0..config.n_h)
        .map(|id| HfTrader {
            id,
            delta_x: hf::sample_threshold(&hf_params, rng),
            net_position: 0,
        })
        .collect();
    Ok(MarketState {
        session: 0,
        closing_prices: Vec::new(),
        fundamental: FundamentalTrack::new(config.initial_price),
        book: LimitOrderBook::new(),
        lf_population,
        hf_population,
        lf_params,
        hf_params,
        initial_price: config.initial_price,
        next_order_id: 0,
    })
}

impl MarketState {
    /// Last closing price, falling back to the initial price before any
    /// session has completed.
    pub fn prev_close(&self) -> f64 {
        self.closing_prices.last().copied().unwrap_or(self.initial_price)
    }

    fn prev_close2(&self) -> f64 {
        let n = self.closing_prices.len();
        if n >= 2 {
            self.closing_prices[n - 2]
        } else {
            self.initial_price
        }
    }
}

/// Runs one trading session and appends its closing price to the state.
pub fn run_session(
    state: &mut MarketState,
    rng: &mut ChaCha8Rng,
    hf_profits: &mut Vec<f64>,
) -> SessionRecord {
    let t = state.session;
    let tick = state.lf_params.tick_size;
    let prev = state.prev_close();
    let prev2 = state.prev_close2();

    // (b) fundamental value
    let fundamental = lf::evolve_fundamental(&mut state.fundamental, &state.lf_params, rng);

    // (c) active LF traders submit, in id order
    let mut lf_buy_vol = 0u64;
    let mut lf_sell_vol = 0u64;
    let gamma_l = state.lf_params.gamma_l;
    let mut active_lf = Vec::new();
    for idx in 0..state.lf_population.len() {
        if !lf::lf_is_active(&state.lf_population[idx], t) {
            continue;
        }
        active_lf.push(idx);
        let strategy = state.lf_population[idx].strategy;
        let plan = lf::lf_plan(strategy, prev, prev2, fundamental, &state.lf_params, rng);
        let trader = &mut state.lf_population[idx];
        trader.last = Some(LfSubmission {
            limit_price: plan.limit_price as f64 * tick,
            demand_c: plan.demand_c,
            demand_f: plan.demand_f,
        });
        trader.next_active_at = lf::next_activation(t, trader.theta_i);
        if let Some((side, size)) = plan.order {
            let id = state.next_order_id;
            state.next_order_id += 1;
            state
                .book
                .insert_order(Order {
                    id,
                    side,
                    size,
                    price: plan.limit_price,
                    owner_class: AgentClass::Lf,
                    owner_id: trader.id,
                    placed_at: t,
                    expires_after: t + gamma_l - 1,
                })
                .expect("fresh id, validated order");
            match side {
                Side::Buy => lf_buy_vol += size,
                Side::Sell => lf_sell_vol += size,
            }
        }
    }
    let spread_pre_match = state.book.bid_ask_spread().map(|s| s as f64 * tick);

    // (d) active HF traders submit sequentially in a random permutation.
    // Structurally inactive in sessions 0 and 1: activation needs two closes.
    let mut hf_buy_vol = 0u64;
    let mut hf_sell_vol = 0u64;
    let mut hf_pending: Vec<(usize, Side, u64, f64)> = Vec::new();
    if t >= 2 && !state.hf_population.is_empty() {
        let mut active_hf: Vec<usize> = (0..state.hf_population.len())
            .filter(|&j| hf::hf_is_active(state.hf_population[j].delta_x, prev, prev2))
            .collect();
        active_hf.shuffle(rng);
        for j in active_hf {
            let side = hf::hf_side(rng);
            let size = hf::hf_order_size(side, &state.book, &state.hf_population[j], &state.hf_params, rng);
            if size == 0 {
                continue;
            }
            let Some(price) = hf::hf_limit_price(side, &state.book, &state.hf_params, rng) else {
                continue;
            };
            let id = state.next_order_id;
            state.next_order_id += 1;
            state
                .book
                .insert_order(Order {
                    id,
                    side,
                    size,
                    price,
                    owner_class: AgentClass::Hf,
                    owner_id: state.hf_population[j].id,
                    placed_at: t,
                    expires_after: t + state.hf_params.gamma_h - 1,
                })
                .expect("fresh id, validated order");
            match side {
                Side::Buy => hf_buy_vol += size,
                Side::Sell => hf_sell_vol += size,
            }
            hf_pending.push((j, side, size, price as f64 * tick));
        }
    }

    // (e) batch matching
    let trades = state.book.match_session(t);

    // (f) closing price: maximum executed price, previous close if no trades
    let close = trades
        .iter()
        .map(|tr| tr.price_half_ticks)
        .max()
        .map(|half| half as f64 * tick * 0.5)
        .unwrap_or(prev);
    state.closing_prices.push(close);

    // executed volumes and per-HF fills
    let mut lf_exec_vol = 0u64;
    let mut hf_exec_vol = 0u64;
    let mut hf_fills: Vec<(u64, u64)> = vec![(0, 0); state.hf_population.len()];
    for tr in &trades {
        tally_execution(tr, &mut lf_exec_vol, &mut hf_exec_vol, &mut hf_fills);
    }

    // (g) LF hypothetical profits and strategy switching, active traders only
    for &idx in &active_lf {
        let trader = &mut state.lf_population[idx];
        let sub = trader.last.expect("active trader recorded a submission");
        let pi_c = lf::lf_profit(close, sub.limit_price, sub.demand_c);
        let pi_f = lf::lf_profit(close, sub.limit_price, sub.demand_f);
        trader.strategy = lf::switch_strategy(pi_c, pi_f, state.lf_params.zeta, rng);
    }

    // HF position and profit updates
    for (_, side, size, limit_price) in &hf_pending {
        let signed = match side {
            Side::Buy => *size as f64,
            Side::Sell => -(*size as f64),
        };
        hf_profits.push(hf::hf_profit(close, *limit_price, signed));
    }
    for (j, (buys, sells)) in hf_fills.iter().enumerate() {
        if *buys > 0 || *sells > 0 {
            hf::update_position(&mut state.hf_population[j], *buys, *sells);
        }
    }

    let spread_end = state.book.bid_ask_spread().map(|s| s as f64 * tick);

    // (h) expiry of orders whose resting window ends with this session
    state.book.expire_orders(t);

    state.session += 1;
    SessionRecord {
        session: t,
        close,
        fundamental,
        spread_pre_match,
        spread_end,
        lf_buy_vol,
        lf_sell_vol,
        hf_buy_vol,
        hf_sell_vol,
        lf_exec_vol,
        hf_exec_vol,
        n_trades: trades.len() as u32,
    }
}

fn tally_execution(
    trade: &Trade,
    lf_exec: &mut u64,
    hf_exec: &mut u64,
    hf_fills: &mut [(u64, u64)],
) {
    match trade.buyer_class {
        AgentClass::Lf => *lf_exec += trade.size,
        AgentClass::Hf => {
            *hf_exec += trade.size;
            hf_fills[trade.buyer_id as usize].0 += trade.size;
        }
    }
    match trade.seller_class {
        AgentClass::Lf => *lf_exec += trade.size,
        AgentClass::Hf => {
            *hf_exec += trade.size;
            hf_fills[trade.seller_id as usize].1 += trade.size;
        }
    }
}

/// One full seeded run of `config.t` sessions.
pub fn run_simulation(config: &Config, seed: u64, scenario: &str) -> Result<RunRecord, ConfigError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = init_state(config, &mut rng)?;
    let mut sessions = Vec::with_capacity(config.t as usize);
    let mut hf_profits = Vec::new();
    for _ in 0..config.t {
        sessions.push(run_session(&mut state, &mut rng, &mut hf_profits));
    }
    let n_lf = state.lf_population.len() as u32;
    let chartists = state.lf_population.iter().filter(|a| a.strategy == Strategy::Chartist).count();
    let summary = PopulationSummary {
        n_lf,
        n_hf: state.hf_population.len() as u32,
        chartist_share_final: if n_lf > 0 { chartists as f64 / n_lf as f64 } else { 0.0 },
        mean_theta: mean(state.lf_population.iter().map(|a| a.theta_i)),
        mean_activation_threshold: mean(state.hf_population.iter().map(|a| a.delta_x)),
        max_abs_hf_position: state.hf_population.iter().map(|a| a.net_position.abs()).max().unwrap_or(0),
        hf_order_count: hf_profits.len() as u64,
        hf_profit_mean: mean(hf_profits.iter().copied()),
    };
    Ok(RunRecord {
        seed,
        scenario: scenario.to_string(),
        sessions,
        summary,
        hf_profits,
    })
}

fn mean(iter: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for x in iter {
        sum += x;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Independent runs, one per seed; result order matches seed order
/// regardless of the execution schedule.
pub fn run_monte_carlo(config: &Config, seeds: &[u64], scenario: &str) -> Result<Vec<RunRecord>, ConfigError> {
    seeds
        .par_iter()
        .map(|&seed| run_simulation(config, seed, scenario))
        .collect()
}

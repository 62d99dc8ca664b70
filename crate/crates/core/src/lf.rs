//! Low-frequency traders: chronological activation, chartist and
//! fundamentalist demands, limit pricing, hypothetical profits and
//! logit strategy switching.

use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::book::{Side, Ticks};
use crate::config::Config;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    Chartist,
    Fundamentalist,
}

/// Parameters driving the LF population, extracted from the [`Config`].
#[derive(Debug, Clone, Copy)]
pub struct LfParams {
    pub alpha_c: f64,
    pub alpha_f: f64,
    pub sigma_c: f64,
    pub sigma_f: f64,
    pub sigma_z: f64,
    pub delta: f64,
    pub sigma_y: f64,
    pub zeta: f64,
    pub gamma_l: u32,
    pub n_l: u32,
    pub theta: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub demand_scale: f64,
    pub tick_size: f64,
}

impl From<&Config> for LfParams {
    fn from(c: &Config) -> Self {
        LfParams {
            alpha_c: c.alpha_c,
            alpha_f: c.alpha_f,
            sigma_c: c.sigma_c,
            sigma_f: c.sigma_f,
            sigma_z: c.sigma_z,
            delta: c.delta,
            sigma_y: c.sigma_y,
            zeta: c.zeta,
            gamma_l: c.gamma_l,
            n_l: c.n_l,
            theta: c.theta,
            theta_min: c.theta_min,
            theta_max: c.theta_max,
            demand_scale: c.demand_scale,
            tick_size: c.tick_size,
        }
    }
}

/// One low-frequency trader's strategy state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LfTrader {
    pub id: u32,
    /// Activation period in sessions, drawn once at initialization.
    pub theta_i: f64,
    pub strategy: Strategy,
    pub next_active_at: u32,
    pub last: Option<LfSubmission>,
}

/// What an active trader recorded at submission time, for end-of-session
/// profit evaluation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LfSubmission {
    /// Decimal limit price (tick-aligned).
    pub limit_price: f64,
    pub demand_c: f64,
    pub demand_f: f64,
}

/// Geometric-random-walk fundamental value track.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FundamentalTrack {
    pub values: Vec<f64>,
}

impl FundamentalTrack {
    pub fn new(f0: f64) -> Self {
        assert!(f0 > 0.0);
        FundamentalTrack { values: vec![f0] }
    }

    pub fn current(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

/// Activation period: truncated exponential with mean `theta` on
/// `[theta_min, theta_max]`, sampled by rejection.
pub fn sample_theta<R: Rng>(params: &LfParams, rng: &mut R) -> f64 {
    let exp = Exp::new(1.0 / params.theta).expect("theta > 0");
    loop {
        let x: f64 = exp.sample(rng);
        if x >= params.theta_min && x <= params.theta_max {
            return x;
        }
    }
}

/// True iff the trader participates in session `t`.
pub fn lf_is_active(trader: &LfTrader, t: u32) -> bool {
    t >= trader.next_active_at
}

/// Next activation after submitting at `t`: rounded period, minimum step 1.
pub fn next_activation(t: u32, theta_i: f64) -> u32 {
    t + (theta_i.round() as u32).max(1)
}

/// Chartist demand: trend-following on the last closing-price change.
pub fn chartist_demand<R: Rng>(prev_close: f64, prev_close2: f64, params: &LfParams, rng: &mut R) -> f64 {
    let eps = Normal::new(0.0, params.sigma_c).expect("sigma_c >= 0").sample(rng);
    params.alpha_c * (prev_close - prev_close2) + eps
}

/// Fundamentalist demand: mean reversion toward the fundamental value.
pub fn fundamentalist_demand<R: Rng>(fundamental: f64, prev_close: f64, params: &LfParams, rng: &mut R) -> f64 {
    let eps = Normal::new(0.0, params.sigma_f).expect("sigma_f >= 0").sample(rng);
    params.alpha_f * (fundamental - prev_close) + eps
}

/// Advances the fundamental one session: `F_t = F_{t-1}(1+delta)(1+y_t)`.
/// Shocks that would make the multiplier non-positive are redrawn.
pub fn evolve_fundamental<R: Rng>(track: &mut FundamentalTrack, params: &LfParams, rng: &mut R) -> f64 {
    let normal = Normal::new(0.0, params.sigma_y).expect("sigma_y >= 0");
    let y = loop {
        let y: f64 = normal.sample(rng);
        if 1.0 + y > 0.0 {
            break y;
        }
    };
    let f = track.current() * (1.0 + params.delta) * (1.0 + y);
    track.values.push(f);
    f
}

/// Limit price around the last close, rounded to the tick, floored at one
/// tick. Offsets that would make the multiplier non-positive are redrawn.
pub fn lf_limit_price<R: Rng>(prev_close: f64, params: &LfParams, rng: &mut R) -> Ticks {
    let normal = Normal::new(0.0, params.sigma_z).expect("sigma_z >= 0");
    let z = loop {
        let z: f64 = normal.sample(rng);
        if 1.0 + z > 0.0 {
            break z;
        }
    };
    let raw = prev_close * (1.0 + params.delta) * (1.0 + z);
    ((raw / params.tick_size).round() as Ticks).max(1)
}

/// An active trader's session plan: both demands, the limit price and the
/// (possibly absent) order implied by the current strategy.
#[derive(Debug, Clone, Copy)]
pub struct LfPlan {
    pub demand_c: f64,
    pub demand_f: f64,
    pub limit_price: Ticks,
    pub order: Option<(Side, u64)>,
}

/// Composes the demand rules into one order. The active demand picks
/// side and size; both demands are recorded for profit evaluation.
pub fn lf_plan<R: Rng>(
    strategy: Strategy,
    prev_close: f64,
    prev_close2: f64,
    fundamental: f64,
    params: &LfParams,
    rng: &mut R,
) -> LfPlan {
    let demand_c = chartist_demand(prev_close, prev_close2, params, rng);
    let demand_f = fundamentalist_demand(fundamental, prev_close, params, rng);
    let limit_price = lf_limit_price(prev_close, params, rng);
    let demand = match strategy {
        Strategy::Chartist => demand_c,
        Strategy::Fundamentalist => demand_f,
    };
    let size = (demand.abs() * params.demand_scale).round() as u64;
    let order = if size == 0 {
        None
    } else if demand > 0.0 {
        Some((Side::Buy, size))
    } else {
        Some((Side::Sell, size))
    };
    LfPlan { demand_c, demand_f, limit_price, order }
}

/// Hypothetical profit of one strategy at the session close.
pub fn lf_profit(close: f64, limit_price: f64, demand: f64) -> f64 {
    (close - limit_price) * demand
}

/// Probability of following the chartist rule next session, evaluated
/// overflow-safe as `1 / (1 + exp((pi_f - pi_c) / zeta))`.
pub fn logit_chartist_prob<S: Real>(pi_c: S, pi_f: S, zeta: S) -> S {
    S::one() / (S::one() + ((pi_f - pi_c) / zeta).exp())
}

/// Logit draw between the two strategies given this session's profits.
pub fn switch_strategy<R: Rng>(pi_c: f64, pi_f: f64, zeta: f64, rng: &mut R) -> Strategy {
    let p_c = logit_chartist_prob(pi_c, pi_f, zeta);
    if rng.gen::<f64>() < p_c {
        Strategy::Chartist
    } else {
        Strategy::Fundamentalist
    }
}

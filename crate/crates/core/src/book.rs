//! Price-time-priority limit-order book with once-per-session batch
//! matching, partial fills and order expiry.
//!
//! Prices are held internally as integer ticks so that priority ordering
//! and midpoint trade prices are exact. Trade prices (midpoint of the two
//! matched limit prices) may land on a half tick and are therefore stored
//! in half-tick units.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type OrderId = u64;
/// Price expressed in integer ticks.
pub type Ticks = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Buy => Side::Sell,
            Side::Sell => Side::Buy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentClass {
    Lf,
    Hf,
}

/// A resting limit order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Order {
    pub id: OrderId,
    pub side: Side,
    /// Remaining size in asset units; always >= 1 while resting.
    pub size: u64,
    /// Limit price in ticks; always >= 1.
    pub price: Ticks,
    pub owner_class: AgentClass,
    pub owner_id: u32,
    /// Session the order was placed in.
    pub placed_at: u32,
    /// Last session the order may rest in the book:
    /// `placed_at + gamma - 1` for a resting lifetime of `gamma` sessions.
    pub expires_after: u32,
}

/// An executed match between one bid and one ask.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trade {
    pub buy_order_id: OrderId,
    pub sell_order_id: OrderId,
    pub size: u64,
    /// Midpoint of the two limit prices, in half-tick units
    /// (`bid_ticks + ask_ticks`); decimal price is `price_half_ticks * tick / 2`.
    pub price_half_ticks: i64,
    pub session: u32,
    pub buyer_class: AgentClass,
    pub buyer_id: u32,
    pub seller_class: AgentClass,
    pub seller_id: u32,
}

impl Trade {
    /// Decimal trade price for a given tick size.
    pub fn price(&self, tick_size: f64) -> f64 {
        self.price_half_ticks as f64 * tick_size * 0.5
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BookError {
    #[error("duplicate order id {0}")]
    DuplicateId(OrderId),
    #[error("order size must be >= 1")]
    NonPositiveSize,
    #[error("order price must be >= 1 tick")]
    NonPositivePrice,
}

/// Two price-time-priority queues (bids, asks) with expiry bookkeeping
/// and cached per-class volume totals.
#[derive(Debug, Clone, Default)]
pub struct LimitOrderBook {
    /// Best bid = highest key; FIFO within a level.
    bids: BTreeMap<Ticks, VecDeque<Order>>,
    /// Best ask = lowest key; FIFO within a level.
    asks: BTreeMap<Ticks, VecDeque<Order>>,
    live: HashMap<OrderId, (Side, Ticks)>,
    expiry: BTreeMap<u32, Vec<OrderId>>,
    /// Remaining volume by [side][owner class].
    vol: [[u64; 2]; 2],
}

fn side_idx(side: Side) -> usize {
    match side {
        Side::Buy => 0,
        Side::Sell => 1,
    }
}

fn class_idx(class: AgentClass) -> usize {
    match class {
        AgentClass::Lf => 0,
        AgentClass::Hf => 1,
    }
}

impl LimitOrderBook {
    pub fn new() -> Self {
        Self::default()
    }

    /// Places an order at the position dictated by (price, placed_at, id).
    /// No matching happens at insert time; matching is batched per session.
    pub fn insert_order(&mut self, order: Order) -> Result<(), BookError> {
        if order.size == 0 {
            return Err(BookError::NonPositiveSize);
        }
        if order.price <= 0 {
            return Err(BookError::NonPositivePrice);
        }
        if self.live.contains_key(&order.id) {
            return Err(BookError::DuplicateId(order.id));
        }
        self.live.insert(order.id, (order.side, order.price));
        self.expiry.entry(order.expires_after).or_default().push(order.id);
        self.vol[side_idx(order.side)][class_idx(order.owner_class)] += order.size;
        let level = match order.side {
            Side::Buy => self.bids.entry(order.price).or_default(),
            Side::Sell => self.asks.entry(order.price).or_default(),
        };
        // Orders arrive in (placed_at, id) order, so FIFO keeps the level sorted.
        level.push_back(order);
        Ok(())
    }

    pub fn best_bid(&self) -> Option<Ticks> {
        self.bids.keys().next_back().copied()
    }

    pub fn best_ask(&self) -> Option<Ticks> {
        self.asks.keys().next().copied()
    }

    /// Best ask minus best bid; absent if either side is empty.
    pub fn bid_ask_spread(&self) -> Option<Ticks> {
        Some(self.best_ask()? - self.best_bid()?)
    }

    /// Sum of remaining sizes on a side, optionally filtered by owner class.
    pub fn side_volume(&self, side: Side, owner_class: Option<AgentClass>) -> u64 {
        let s = side_idx(side);
        match owner_class {
            Some(c) => self.vol[s][class_idx(c)],
            None => self.vol[s][0] + self.vol[s][1],
        }
    }

    pub fn order_count(&self) -> usize {
        self.live.len()
    }

    pub fn contains(&self, id: OrderId) -> bool {
        self.live.contains_key(&id)
    }

    /// All resting orders, bids first, in (price priority, time) order.
    pub fn iter_orders(&self) -> impl Iterator<Item = &Order> {
        self.bids
            .values()
            .rev()
            .flat_map(|q| q.iter())
            .chain(self.asks.values().flat_map(|q| q.iter()))
    }

    /// Batch matching: while the best bid crosses the best ask, match the
    /// two front orders at the midpoint of their limit prices. Partially
    /// filled orders keep their queue position with reduced size.
    pub fn match_session(&mut self, session: u32) -> Vec<Trade> {
        let mut trades = Vec::new();
        loop {
            let (bid_price, ask_price) = match (self.best_bid(), self.best_ask()) {
                (Some(b), Some(a)) if b >= a => (b, a),
                _ => break,
            };
            let buy = self.bids.get_mut(&bid_price).and_then(|q| q.front_mut()).unwrap();
            let sell = self.asks.get_mut(&ask_price).and_then(|q| q.front_mut()).unwrap();
            let size = buy.size.min(sell.size);
            trades.push(Trade {
                buy_order_id: buy.id,
                sell_order_id: sell.id,
                size,
                price_half_ticks: bid_price + ask_price,
                session,
                buyer_class: buy.owner_class,
                buyer_id: buy.owner_id,
                seller_class: sell.owner_class,
                seller_id: sell.owner_id,
            });
            for (price, side) in [(bid_price, Side::Buy), (ask_price, Side::Sell)] {
                self.fill_front(side, price, size);
            }
        }
        trades
    }

    fn fill_front(&mut self, side: Side, price: Ticks, size: u64) {
        let levels = match side {
            Side::Buy => &mut self.bids,
            Side::Sell => &mut self.asks,
        };
        let level = levels.get_mut(&price).unwrap();
        let front = level.front_mut().unwrap();
        front.size -= size;
        self.vol[side_idx(side)][class_idx(front.owner_class)] -= size;
        if front.size == 0 {
            let gone = level.pop_front().unwrap();
            self.live.remove(&gone.id);
            if level.is_empty() {
                levels.remove(&price);
            }
        }
    }

    /// Removes every order whose resting window has elapsed by the end of
    /// `session` (i.e. `expires_after <= session`). Returns the removed
    /// orders with their remaining sizes.
    pub fn expire_orders(&mut self, session: u32) -> Vec<Order> {
        let due: Vec<u32> = self.expiry.range(..=session).map(|(k, _)| *k).collect();
        let mut removed = Vec::new();
        for key in due {
            for id in self.expiry.remove(&key).unwrap() {
                // Executed orders have already left the live index.
                if let Some((side, price)) = self.live.remove(&id) {
                    removed.push(self.remove_resting(side, price, id));
                }
            }
        }
        removed
    }

    fn remove_resting(&mut self, side: Side, price: Ticks, id: OrderId) -> Order {
        let levels = match side {
            Side::Buy => &mut self.bids,
            Side::Sell => &mut self.asks,
        };
        let level = levels.get_mut(&price).unwrap();
        let pos = level.iter().position(|o| o.id == id).unwrap();
        let order = level.remove(pos).unwrap();
        self.vol[side_idx(side)][class_idx(order.owner_class)] -= order.size;
        if level.is_empty() {
            levels.remove(&price);
        }
        order
    }

    /// Debug snapshot with decimal prices, serializable as JSON.
    pub fn snapshot(&self, tick_size: f64) -> BookSnapshot {
        let side = |levels: Vec<&Order>| {
            levels
                .into_iter()
                .map(|o| OrderSnapshot {
                    id: o.id,
                    side: o.side,
                    size: o.size,
                    price: o.price as f64 * tick_size,
                    owner_class: o.owner_class,
                    owner_id: o.owner_id,
                    placed_at: o.placed_at,
                    expires_after: o.expires_after,
                })
                .collect()
        };
        BookSnapshot {
            bids: side(self.bids.values().rev().flat_map(|q| q.iter()).collect()),
            asks: side(self.asks.values().flat_map(|q| q.iter()).collect()),
        }
    }
}

/// JSON-friendly view of an [`Order`] with the price in decimal units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderSnapshot {
    pub id: OrderId,
    pub side: Side,
    pub size: u64,
    pub price: f64,
    pub owner_class: AgentClass,
    pub owner_id: u32,
    pub placed_at: u32,
    pub expires_after: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BookSnapshot {
    pub bids: Vec<OrderSnapshot>,
    pub asks: Vec<OrderSnapshot>,
}

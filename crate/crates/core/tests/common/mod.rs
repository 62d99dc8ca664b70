//! Helpers shared by the integration tests: a brute-force reference
//! matcher and a randomized book generator.

#![allow(dead_code)]

use lobsim::book::{AgentClass, LimitOrderBook, Order, Side, Trade};
use rand::Rng;

/// Independent list-based reference implementation of batch matching.
///
/// Keeps every order in a flat vector sorted by price priority and then
/// by arrival (`placed_at`, `id`), and repeatedly crosses the front bid
/// against the front ask at the midpoint of their limit prices.
pub fn brute_force_match(orders: &[Order], session: u32) -> Vec<Trade> {
    let mut bids: Vec<Order> = orders.iter().filter(|o| o.side == Side::Buy).cloned().collect();
    let mut asks: Vec<Order> = orders.iter().filter(|o| o.side == Side::Sell).cloned().collect();
    bids.sort_by(|a, b| {
        b.price.cmp(&a.price).then(a.placed_at.cmp(&b.placed_at)).then(a.id.cmp(&b.id))
    });
    asks.sort_by(|a, b| {
        a.price.cmp(&b.price).then(a.placed_at.cmp(&b.placed_at)).then(a.id.cmp(&b.id))
    });
    let mut trades = Vec::new();
    while let (Some(buy), Some(sell)) = (bids.first(), asks.first()) {
        if buy.price < sell.price {
            break;
        }
        let size = buy.size.min(sell.size);
        trades.push(Trade {
            buy_order_id: buy.id,
            sell_order_id: sell.id,
            size,
            price_half_ticks: buy.price + sell.price,
            session,
            buyer_class: buy.owner_class,
            buyer_id: buy.owner_id,
            seller_class: sell.owner_class,
            seller_id: sell.owner_id,
        });
        bids[0].size -= size;
        asks[0].size -= size;
        if bids[0].size == 0 {
            bids.remove(0);
        }
        if asks[0].size == 0 {
            asks.remove(0);
        }
    }
    trades
}

/// Draws up to `max_orders` random orders with clustered prices so that
/// crossings are common, in valid arrival order.
pub fn random_orders<R: Rng>(rng: &mut R, max_orders: usize) -> Vec<Order> {
    let n = rng.gen_range(0..=max_orders);
    let mut orders: Vec<Order> = (0..n)
        .map(|i| {
            let side = if rng.gen_bool(0.5) { Side::Buy } else { Side::Sell };
            let class = if rng.gen_bool(0.5) { AgentClass::Lf } else { AgentClass::Hf };
            Order {
                id: i as u64,
                side,
                size: rng.gen_range(1..=8),
                price: rng.gen_range(95..=105),
                owner_class: class,
                owner_id: rng.gen_range(0..50),
                placed_at: rng.gen_range(0..=3),
                expires_after: 100,
            }
        })
        .collect();
    orders.sort_by_key(|o| (o.placed_at, o.id));
    orders
}

/// Builds a `LimitOrderBook` holding exactly `orders`.
pub fn book_from_orders(orders: &[Order]) -> LimitOrderBook {
    let mut book = LimitOrderBook::new();
    for order in orders {
        book.insert_order(order.clone()).expect("valid random order");
    }
    book
}

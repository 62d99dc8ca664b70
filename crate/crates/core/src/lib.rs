//! Agent-based simulator of a single-asset limit-order-book market where
//! low-frequency (chronological-time) and high-frequency (event-time)
//! traders interact, plus the analytics pipeline used to study return
//! statistics, flash crashes and order-cancellation effects.
//!
//! The statistics kernels in [`analytics`] are generic over the scalar
//! type (see [`scalar::Real`]); the simulation engine itself runs on
//! [`Price`] (`f64`).

pub mod analytics;
pub mod book;
pub mod config;
pub mod engine;
pub mod experiment;
pub mod hf;
pub mod lf;
pub mod output;
pub mod scalar;
pub mod svg;

pub use book::{AgentClass, LimitOrderBook, Order, OrderId, Side, Ticks, Trade};
pub use config::Config;
pub use engine::{run_monte_carlo, run_simulation, MarketState, RunRecord, SessionRecord};

/// Concrete scalar used by the simulation engine and the CLI.
pub type Price = f64;

//! Statistics over [`RunRecord`](crate::engine::RunRecord)s: stylized-fact
//! batteries, flash-crash detection and phase labeling, conditioned
//! correlations, spread/concentration distributions and tail fits.
//!
//! All operations here are pure functions over immutable inputs.

mod concentration;
mod corr;
mod crashes;
mod kde;
mod returns;
mod summary;
mod tail;

pub use concentration::{
    concentration_curves, sell_concentration_ratios, ConcentrationSample, PhaseCurves,
};
pub use corr::{
    conditional_correlations, pearson, CorrelationCells, CorrelationTable, VolumeCorrelations,
};
pub use crashes::{detect_flash_crashes, CrashConfig, FlashCrashEvent, PhaseLabel};
pub use kde::{
    empirical_ccdf, grid, kernel_ccdf, kernel_density, median, quantile, silverman_bandwidth,
};
pub use returns::{acf, acf_band, excess_kurtosis, log_returns, volatility};
pub use summary::{
    label_runs, summarize, AggCells, AggCorrelations, MeanSe, RunStats, StatSummary,
};
pub use tail::{fit_magnitudes, tail_fit, TailFit};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("price series must be strictly positive")]
    NonPositivePrice,
    #[error("series too short: need at least {need}, got {got}")]
    SeriesTooShort { need: usize, got: usize },
    #[error("series is constant; statistic undefined")]
    ConstantSeries,
    #[error("insufficient tail sample: need at least {need}, got {got}")]
    InsufficientTail { need: usize, got: usize },
}

//! Cross-run aggregation: per-run statistics, Monte-Carlo means and
//! standard errors, and the serialized run-batch summary.

use serde::{Deserialize, Serialize};

use crate::engine::RunRecord;

use super::corr::{conditional_correlations, CorrelationCells, CorrelationTable, VolumeCorrelations};
use super::crashes::{detect_flash_crashes, CrashConfig, PhaseLabel};
use super::returns::{excess_kurtosis, log_returns, volatility};
use super::tail::{tail_fit, TailFit};

/// A cross-run mean with its Monte-Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl MeanSe {
    /// Aggregates a sample of per-run values; `None` when empty.
    pub fn from_values(values: &[f64]) -> Option<MeanSe> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let se = if n < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
            (var / n as f64).sqrt()
        };
        Some(MeanSe { mean, se, n })
    }
}

/// Headline statistics of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub seed: u64,
    pub sigma_p: f64,
    pub n_crashes: usize,
    /// Mean event duration; absent when the run has no crashes.
    pub mean_duration: Option<f64>,
    pub correlations: VolumeCorrelations,
}

/// Cross-run aggregate of one correlation table cell set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggCells {
    pub total: Option<MeanSe>,
    pub hf: Option<MeanSe>,
    pub lf: Option<MeanSe>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggCorrelations {
    pub unconditional: AggCells,
    pub flash_crashes: AggCells,
    pub normal_times: AggCells,
}

/// Per-run and cross-run statistics of one scenario batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub scenario: String,
    pub n_runs: usize,
    pub sigma_p: Option<MeanSe>,
    pub crash_count: Option<MeanSe>,
    /// Mean flash-crash duration across runs that had crashes.
    pub crash_duration: Option<MeanSe>,
    pub correlations_submitted: AggCorrelations,
    pub correlations_executed: AggCorrelations,
    /// Power-law fit of the pooled negative-return tail; absent when the
    /// pooled tail sample is too small.
    pub tail: Option<TailFit>,
    pub excess_kurtosis: Option<f64>,
    pub per_run: Vec<RunStats>,
}

/// Computes every per-run statistic and its cross-run aggregate.
pub fn summarize(runs: &[RunRecord], cfg: &CrashConfig) -> StatSummary {
    let mut per_run = Vec::with_capacity(runs.len());
    let mut pooled_returns = Vec::new();
    for run in runs {
        let closes = run.closes();
        let returns = log_returns(&closes).unwrap_or_default();
        let (events, labels) = detect_flash_crashes(&closes, cfg);
        let correlations = conditional_correlations(run, &labels);
        per_run.push(RunStats {
            seed: run.seed,
            sigma_p: volatility(&returns).unwrap_or(0.0),
            n_crashes: events.len(),
            mean_duration: if events.is_empty() {
                None
            } else {
                Some(events.iter().map(|e| e.duration as f64).sum::<f64>() / events.len() as f64)
            },
            correlations,
        });
        pooled_returns.extend(returns);
    }

    let sigma_values: Vec<f64> = per_run.iter().map(|r| r.sigma_p).collect();
    let crash_values: Vec<f64> = per_run.iter().map(|r| r.n_crashes as f64).collect();
    let duration_values: Vec<f64> = per_run.iter().filter_map(|r| r.mean_duration).collect();

    StatSummary {
        scenario: runs.first().map(|r| r.scenario.clone()).unwrap_or_default(),
        n_runs: runs.len(),
        sigma_p: MeanSe::from_values(&sigma_values),
        crash_count: MeanSe::from_values(&crash_values),
        crash_duration: MeanSe::from_values(&duration_values),
        correlations_submitted: aggregate(per_run.iter().map(|r| &r.correlations.submitted)),
        correlations_executed: aggregate(per_run.iter().map(|r| &r.correlations.executed)),
        tail: tail_fit(&pooled_returns).ok(),
        excess_kurtosis: excess_kurtosis(&pooled_returns).ok(),
        per_run,
    }
}

fn aggregate<'a>(tables: impl Iterator<Item = &'a CorrelationTable> + Clone) -> AggCorrelations {
    let cells = |pick: &dyn Fn(&CorrelationTable) -> CorrelationCells| {
        let collect = |get: &dyn Fn(&CorrelationCells) -> Option<f64>| {
            let values: Vec<f64> = tables.clone().filter_map(|t| get(&pick(t))).collect();
            MeanSe::from_values(&values)
        };
        AggCells {
            total: collect(&|c| c.total),
            hf: collect(&|c| c.hf),
            lf: collect(&|c| c.lf),
        }
    };
    AggCorrelations {
        unconditional: cells(&|t| t.unconditional),
        flash_crashes: cells(&|t| t.flash_crashes),
        normal_times: cells(&|t| t.normal_times),
    }
}

/// Phase labels for every run of a batch.
pub fn label_runs(runs: &[RunRecord], cfg: &CrashConfig) -> Vec<Vec<PhaseLabel>> {
    runs.iter().map(|r| detect_flash_crashes(&r.closes(), cfg).1).collect()
}

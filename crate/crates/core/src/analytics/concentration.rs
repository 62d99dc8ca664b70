//! Sell-concentration ratios: an agent class's sell order volume over its
//! total submitted volume, per session, pooled by market phase.

use serde::{Deserialize, Serialize};

use crate::book::AgentClass;
use crate::engine::RunRecord;

use super::crashes::PhaseLabel;
use super::kde;

/// One session's concentration observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationSample {
    pub seed: u64,
    pub session: u32,
    pub ratio: f64,
    pub phase: PhaseLabel,
}

/// Per-session sell-concentration ratios for one agent class across runs.
/// Sessions where the class submits nothing are absent.
pub fn sell_concentration_ratios(
    runs: &[RunRecord],
    labels_per_run: &[Vec<PhaseLabel>],
    class: AgentClass,
) -> Vec<ConcentrationSample> {
    let mut out = Vec::new();
    for (run, labels) in runs.iter().zip(labels_per_run.iter()) {
        for (s, &phase) in run.sessions.iter().zip(labels.iter()) {
            let (buy, sell) = match class {
                AgentClass::Lf => (s.lf_buy_vol, s.lf_sell_vol),
                AgentClass::Hf => (s.hf_buy_vol, s.hf_sell_vol),
            };
            let total = buy + sell;
            if total == 0 {
                continue;
            }
            out.push(ConcentrationSample {
                seed: run.seed,
                session: s.session,
                ratio: sell as f64 / total as f64,
                phase,
            });
        }
    }
    out
}

/// Kernel density and CCDF curves of concentration ratios for one phase,
/// evaluated on a shared grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCurves {
    pub phase: PhaseLabel,
    pub n: usize,
    pub density: Vec<f64>,
    pub kernel_ccdf: Vec<f64>,
    pub empirical_ccdf: Vec<f64>,
}

/// Curves for every phase with data, on `grid`.
pub fn concentration_curves(samples: &[ConcentrationSample], grid: &[f64]) -> Vec<PhaseCurves> {
    [PhaseLabel::NormalTimes, PhaseLabel::Crash, PhaseLabel::Recovery]
        .into_iter()
        .filter_map(|phase| {
            let vals: Vec<f64> = samples.iter().filter(|s| s.phase == phase).map(|s| s.ratio).collect();
            if vals.is_empty() {
                return None;
            }
            let h = kde::silverman_bandwidth(&vals);
            Some(PhaseCurves {
                phase,
                n: vals.len(),
                density: kde::kernel_density(&vals, h, grid),
                kernel_ccdf: kde::kernel_ccdf(&vals, h, grid),
                empirical_ccdf: kde::empirical_ccdf(&vals, grid),
            })
        })
        .collect()
}

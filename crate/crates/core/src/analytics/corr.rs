//! Correlations between price returns and order volumes, conditioned on
//! market phase.

use serde::{Deserialize, Serialize};

use crate::book::AgentClass;
use crate::engine::RunRecord;
use crate::scalar::Real;

use super::crashes::PhaseLabel;
use super::returns::log_returns;

/// Pearson correlation; absent for degenerate inputs.
pub fn pearson<S: Real>(x: &[S], y: &[S]) -> Option<S> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = S::from_usize_(x.len());
    let mx = x.iter().copied().sum::<S>() / n;
    let my = y.iter().copied().sum::<S>() / n;
    let mut sxx = S::zero();
    let mut syy = S::zero();
    let mut sxy = S::zero();
    for (&a, &b) in x.iter().zip(y.iter()) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == S::zero() || syy == S::zero() {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Correlation of returns with total / HF / LF volumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCells {
    pub total: Option<f64>,
    pub hf: Option<f64>,
    pub lf: Option<f64>,
}

/// Cells per conditioning phase. Flash crashes pool crash and recovery
/// sessions; a cell is absent when its phase holds fewer than 3 sessions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub unconditional: CorrelationCells,
    pub flash_crashes: CorrelationCells,
    pub normal_times: CorrelationCells,
}

/// Submitted-volume correlations (the headline statistic) plus the
/// executed-volume variant for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeCorrelations {
    pub submitted: CorrelationTable,
    pub executed: CorrelationTable,
}

const MIN_PHASE_SESSIONS: usize = 3;

/// Per-run correlation table between session returns and volumes.
/// Return `r_t` pairs with the volume of session `t`.
pub fn conditional_correlations(run: &RunRecord, labels: &[PhaseLabel]) -> VolumeCorrelations {
    let closes = run.closes();
    let returns = log_returns(&closes).unwrap_or_default();
    let sessions = &run.sessions[1..];
    debug_assert_eq!(returns.len(), sessions.len());

    let volume_sets = |submitted: bool| -> [Vec<f64>; 3] {
        let mut total = Vec::with_capacity(sessions.len());
        let mut hf = Vec::with_capacity(sessions.len());
        let mut lf = Vec::with_capacity(sessions.len());
        for s in sessions {
            if submitted {
                total.push(s.submitted_volume(None) as f64);
                hf.push(s.submitted_volume(Some(AgentClass::Hf)) as f64);
                lf.push(s.submitted_volume(Some(AgentClass::Lf)) as f64);
            } else {
                total.push((s.lf_exec_vol + s.hf_exec_vol) as f64);
                hf.push(s.hf_exec_vol as f64);
                lf.push(s.lf_exec_vol as f64);
            }
        }
        [total, hf, lf]
    };

    let table = |volumes: &[Vec<f64>; 3]| {
        let select = |keep: &dyn Fn(PhaseLabel) -> bool, series: &[f64]| -> (Vec<f64>, Vec<f64>) {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (i, r) in returns.iter().enumerate() {
                let label = labels[i + 1];
                if keep(label) {
                    xs.push(*r);
                    ys.push(series[i]);
                }
            }
            (xs, ys)
        };
        let cells = |keep: &dyn Fn(PhaseLabel) -> bool| {
            let mut out = [None; 3];
            for (slot, series) in out.iter_mut().zip(volumes.iter()) {
                let (xs, ys) = select(keep, series);
                if xs.len() >= MIN_PHASE_SESSIONS {
                    *slot = pearson(&xs, &ys);
                }
            }
            CorrelationCells { total: out[0], hf: out[1], lf: out[2] }
        };
        CorrelationTable {
            unconditional: cells(&|_| true),
            flash_crashes: cells(&|l: PhaseLabel| l.is_flash_crash()),
            normal_times: cells(&|l: PhaseLabel| l == PhaseLabel::NormalTimes),
        }
    };

    VolumeCorrelations {
        submitted: table(&volume_sets(true)),
        executed: table(&volume_sets(false)),
    }
}

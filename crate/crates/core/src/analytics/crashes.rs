//! Flash-crash detection and per-session phase labeling.

use serde::{Deserialize, Serialize};

use crate::config::Config;

/// Market phase of one trading session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseLabel {
    NormalTimes,
    Crash,
    Recovery,
}

impl PhaseLabel {
    /// Crash and recovery sessions together form the flash-crash phase.
    pub fn is_flash_crash(self) -> bool {
        matches!(self, PhaseLabel::Crash | PhaseLabel::Recovery)
    }

    pub fn name(self) -> &'static str {
        match self {
            PhaseLabel::NormalTimes => "normal_times",
            PhaseLabel::Crash => "crash",
            PhaseLabel::Recovery => "recovery",
        }
    }
}

/// One detected flash crash: a drop of at least `threshold` below the
/// running reference price, regained within `recovery_window` sessions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlashCrashEvent {
    pub onset: usize,
    pub trough: usize,
    pub recovery: usize,
    /// Relative drop of the trough below the reference price.
    pub depth: f64,
    /// Sessions from onset to recovery.
    pub duration: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CrashConfig {
    pub threshold: f64,
    pub recovery_window: usize,
    pub reference_window: usize,
}

impl Default for CrashConfig {
    fn default() -> Self {
        CrashConfig { threshold: 0.05, recovery_window: 30, reference_window: 30 }
    }
}

impl From<&Config> for CrashConfig {
    fn from(c: &Config) -> Self {
        CrashConfig {
            threshold: c.crash_threshold,
            recovery_window: c.recovery_window as usize,
            reference_window: c.reference_window as usize,
        }
    }
}

/// Scans a closing-price series for flash crashes.
///
/// A session `t` is a candidate onset when its close is at least
/// `threshold` below the reference price `R`, the maximum close over the
/// trailing `reference_window` sessions before `t`. The event is kept
/// when some later session `u` regains `R` with `u - t <= recovery_window`;
/// sessions `t..=trough` are labeled `Crash`, `trough+1..=u` `Recovery`.
/// Events never overlap; scanning resumes after `u`.
pub fn detect_flash_crashes(closes: &[f64], cfg: &CrashConfig) -> (Vec<FlashCrashEvent>, Vec<PhaseLabel>) {
    let n = closes.len();
    let mut labels = vec![PhaseLabel::NormalTimes; n];
    let mut events = Vec::new();
    let mut t = 1;
    while t < n {
        let lo = t.saturating_sub(cfg.reference_window);
        let reference = closes[lo..t].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if closes[t] <= (1.0 - cfg.threshold) * reference {
            let limit = (t + cfg.recovery_window).min(n - 1);
            let recovery = ((t + 1)..=limit).find(|&u| closes[u] >= reference);
            if let Some(u) = recovery {
                let trough = (t..u)
                    .min_by(|&a, &b| closes[a].partial_cmp(&closes[b]).unwrap())
                    .unwrap();
                for s in t..=trough {
                    labels[s] = PhaseLabel::Crash;
                }
                for s in (trough + 1)..=u {
                    labels[s] = PhaseLabel::Recovery;
                }
                events.push(FlashCrashEvent {
                    onset: t,
                    trough,
                    recovery: u,
                    depth: 1.0 - closes[trough] / reference,
                    duration: u - t,
                });
                t = u + 1;
                continue;
            }
        }
        t += 1;
    }
    (events, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg() -> CrashConfig {
        CrashConfig::default()
    }

    #[test]
    fn constant_series_has_no_events() {
        let closes = vec![100.0; 200];
        let (events, labels) = detect_flash_crashes(&closes, &cfg());
        assert!(events.is_empty());
        assert!(labels.iter().all(|&l| l == PhaseLabel::NormalTimes));
    }

    #[test]
    fn synthetic_crash_with_linear_recovery() {
        // 100 for 21 sessions (indices 0..=20), drop to 94 at index 21,
        // linear recovery back to 100 at index 31.
        let mut closes = vec![100.0; 21];
        closes.push(94.0);
        for i in 1..=10 {
            closes.push(94.0 + 0.6 * i as f64);
        }
        closes.extend(vec![100.0; 10]);
        let (events, labels) = detect_flash_crashes(&closes, &cfg());
        assert_eq!(events.len(), 1);
        let e = &events[0];
        assert_eq!(e.onset, 21);
        assert_eq!(e.trough, 21);
        assert_eq!(e.recovery, 31);
        assert_eq!(e.duration, 10);
        assert_abs_diff_eq!(e.depth, 0.06, epsilon = 1e-12);
        assert_eq!(labels[21], PhaseLabel::Crash);
        assert!(labels[22..=31].iter().all(|&l| l == PhaseLabel::Recovery));
        assert_eq!(labels[20], PhaseLabel::NormalTimes);
        assert_eq!(labels[32], PhaseLabel::NormalTimes);
    }

    #[test]
    fn slow_recovery_is_not_a_flash_crash() {
        // 6% drop that takes 45 sessions to recover.
        let mut closes = vec![100.0; 10];
        closes.push(94.0);
        for i in 1..=45 {
            closes.push(94.0 + 6.0 * i as f64 / 45.0);
        }
        closes.extend(vec![100.0; 10]);
        let (events, _) = detect_flash_crashes(&closes, &cfg());
        assert!(events.is_empty());
    }

    #[test]
    fn labels_partition_the_run_and_events_respect_bounds() {
        // A wavy series with two genuine crashes.
        let mut closes = Vec::new();
        for block in 0..3 {
            closes.extend(vec![100.0; 40]);
            if block < 2 {
                closes.push(92.0);
                closes.push(90.0);
                for i in 1..=8 {
                    closes.push(90.0 + 10.0 * i as f64 / 8.0);
                }
            }
        }
        let (events, labels) = detect_flash_crashes(&closes, &cfg());
        assert_eq!(events.len(), 2);
        assert_eq!(labels.len(), closes.len());
        for e in &events {
            assert!(e.depth >= 0.05);
            assert!(e.duration <= 30);
            assert!(e.onset < e.trough + 1 && e.trough <= e.recovery);
        }
        // no overlap
        assert!(events[0].recovery < events[1].onset);
        let crash = labels.iter().filter(|l| **l == PhaseLabel::Crash).count();
        let rec = labels.iter().filter(|l| **l == PhaseLabel::Recovery).count();
        let normal = labels.iter().filter(|l| **l == PhaseLabel::NormalTimes).count();
        assert_eq!(crash + rec + normal, closes.len());
    }
}

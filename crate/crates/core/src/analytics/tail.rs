//! Power-law tail estimation: Hill maximum likelihood on the negative
//! return tail with the threshold chosen by Kolmogorov-Smirnov
//! minimization over the observed tail points.

use serde::{Deserialize, Serialize};

use super::AnalyticsError;

/// Minimum tail sample the fit will accept.
pub const MIN_TAIL: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// Estimated survival-function exponent: `P(X > x) ~ (x/xmin)^(-alpha)`.
    pub alpha: f64,
    pub xmin: f64,
    /// KS distance between the empirical and fitted tail CCDF.
    pub ks: f64,
    /// Tail observations above `xmin`.
    pub n_tail: usize,
}

/// Fits a power law to the magnitudes of the negative returns.
pub fn tail_fit(returns: &[f64]) -> Result<TailFit, AnalyticsError> {
    let mut tail: Vec<f64> = returns.iter().filter(|&&r| r < 0.0).map(|&r| -r).collect();
    fit_magnitudes(&mut tail)
}

/// Hill fit with KS threshold selection on positive magnitudes.
pub fn fit_magnitudes(magnitudes: &mut Vec<f64>) -> Result<TailFit, AnalyticsError> {
    magnitudes.retain(|&x| x > 0.0);
    let n = magnitudes.len();
    if n <= MIN_TAIL {
        return Err(AnalyticsError::InsufficientTail { need: MIN_TAIL + 1, got: n });
    }
    // descending order: x[0] is the largest loss
    magnitudes.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let log_x: Vec<f64> = magnitudes.iter().map(|x| x.ln()).collect();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for lx in &log_x {
        prefix.push(prefix.last().unwrap() + lx);
    }

    // Candidate thresholds are the observed tail points themselves; stride
    // the candidate set to bound the cost on large samples.
    let k_max = n - 1;
    let stride = ((k_max - MIN_TAIL) / 400).max(1);
    let mut best: Option<TailFit> = None;
    let mut k = MIN_TAIL;
    while k <= k_max {
        let xmin = magnitudes[k];
        let sum_log = prefix[k] - k as f64 * log_x[k];
        if sum_log > 0.0 {
            let alpha = k as f64 / sum_log;
            let ks = ks_distance(&magnitudes[..k], xmin, alpha);
            if best.map_or(true, |b| ks < b.ks) {
                best = Some(TailFit { alpha, xmin, ks, n_tail: k });
            }
        }
        k += stride;
    }
    best.ok_or(AnalyticsError::ConstantSeries)
}

/// Sup distance between the empirical tail CCDF and `(x/xmin)^(-alpha)`
/// over the tail sample (sorted descending).
fn ks_distance(tail_desc: &[f64], xmin: f64, alpha: f64) -> f64 {
    let k = tail_desc.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in tail_desc.iter().enumerate() {
        let fitted = (x / xmin).powf(-alpha);
        let hi = (i as f64 + 1.0) / k;
        let lo = i as f64 / k;
        sup = sup.max((fitted - lo).abs()).max((fitted - hi).abs());
    }
    sup
}

//! Gaussian kernel density and complementary-CDF estimation with the
//! Normal-reference (Silverman) bandwidth, plus empirical counterparts.

use crate::scalar::{std_normal_pdf, std_normal_sf, Real};

/// Normal-reference rule of thumb: `1.06 * sigma * n^(-1/5)`.
pub fn silverman_bandwidth<S: Real>(samples: &[S]) -> S {
    let n = samples.len();
    if n < 2 {
        return S::zero();
    }
    let nf = S::from_usize_(n);
    let mean = samples.iter().copied().sum::<S>() / nf;
    let var = samples.iter().map(|&x| (x - mean) * (x - mean)).sum::<S>() / (nf - S::one());
    let sigma = var.sqrt();
    S::from_f64_(1.06) * sigma * nf.powf(S::from_f64_(-0.2))
}

/// Evenly spaced evaluation grid over `[lo, hi]`.
pub fn grid<S: Real>(lo: S, hi: S, points: usize) -> Vec<S> {
    assert!(points >= 2);
    let step = (hi - lo) / S::from_usize_(points - 1);
    (0..points).map(|i| lo + step * S::from_usize_(i)).collect()
}

/// Kernel CCDF `P(X > x)` on a grid. A zero bandwidth (e.g. a degenerate
/// sample) falls back to the empirical step function.
pub fn kernel_ccdf<S: Real>(samples: &[S], bandwidth: S, grid: &[S]) -> Vec<S> {
    if samples.is_empty() {
        return vec![S::zero(); grid.len()];
    }
    let nf = S::from_usize_(samples.len());
    if bandwidth <= S::zero() {
        return empirical_ccdf(samples, grid);
    }
    grid.iter()
        .map(|&x| samples.iter().map(|&xi| std_normal_sf((x - xi) / bandwidth)).sum::<S>() / nf)
        .collect()
}

/// Kernel density on a grid.
pub fn kernel_density<S: Real>(samples: &[S], bandwidth: S, grid: &[S]) -> Vec<S> {
    if samples.is_empty() || bandwidth <= S::zero() {
        return vec![S::zero(); grid.len()];
    }
    let norm = S::from_usize_(samples.len()) * bandwidth;
    grid.iter()
        .map(|&x| samples.iter().map(|&xi| std_normal_pdf((x - xi) / bandwidth)).sum::<S>() / norm)
        .collect()
}

/// Raw empirical CCDF `P(X > x)` on a grid.
pub fn empirical_ccdf<S: Real>(samples: &[S], grid: &[S]) -> Vec<S> {
    if samples.is_empty() {
        return vec![S::zero(); grid.len()];
    }
    let nf = S::from_usize_(samples.len());
    grid.iter()
        .map(|&x| S::from_usize_(samples.iter().filter(|&&xi| xi > x).count()) / nf)
        .collect()
}

/// Linear-interpolation quantile of an unsorted sample.
pub fn quantile<S: Real>(sample: &[S], q: S) -> Option<S> {
    if sample.is_empty() {
        return None;
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q.max(S::zero()).min(S::one()) * S::from_usize_(sorted.len() - 1);
    let lo = pos.floor().to_f64_() as usize;
    let hi = pos.ceil().to_f64_() as usize;
    let frac = pos - pos.floor();
    Some(sorted[lo] * (S::one() - frac) + sorted[hi] * frac)
}

pub fn median<S: Real>(sample: &[S]) -> Option<S> {
    quantile(sample, S::from_f64_(0.5))
}

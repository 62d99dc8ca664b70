//! Log returns, autocorrelation and moment statistics.

use crate::scalar::Real;

use super::AnalyticsError;

/// Logarithmic differences of a strictly positive price series.
pub fn log_returns<S: Real>(closes: &[S]) -> Result<Vec<S>, AnalyticsError> {
    if closes.len() < 2 {
        return Err(AnalyticsError::SeriesTooShort { need: 2, got: closes.len() });
    }
    if closes.iter().any(|&p| p <= S::zero()) {
        return Err(AnalyticsError::NonPositivePrice);
    }
    Ok(closes.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

/// Sample autocorrelations at lags `1..=max_lag`.
pub fn acf<S: Real>(series: &[S], max_lag: usize) -> Result<Vec<S>, AnalyticsError> {
    let n = series.len();
    if n <= max_lag {
        return Err(AnalyticsError::SeriesTooShort { need: max_lag + 1, got: n });
    }
    let mean = series.iter().copied().sum::<S>() / S::from_usize_(n);
    let denom = series.iter().map(|&x| (x - mean) * (x - mean)).sum::<S>();
    if denom == S::zero() {
        return Err(AnalyticsError::ConstantSeries);
    }
    Ok((1..=max_lag)
        .map(|lag| {
            let num = (lag..n)
                .map(|t| (series[t] - mean) * (series[t - lag] - mean))
                .sum::<S>();
            num / denom
        })
        .collect())
}

/// The 99.3%-coverage Normal band for ACF whiskers: `2.58 / sqrt(n)`.
pub fn acf_band<S: Real>(n: usize) -> S {
    S::from_f64_(2.58) / S::from_usize_(n).sqrt()
}

/// Sample standard deviation (ddof 1) of a return series.
pub fn volatility<S: Real>(returns: &[S]) -> Result<S, AnalyticsError> {
    let n = returns.len();
    if n < 2 {
        return Err(AnalyticsError::SeriesTooShort { need: 2, got: n });
    }
    let mean = returns.iter().copied().sum::<S>() / S::from_usize_(n);
    let ss = returns.iter().map(|&x| (x - mean) * (x - mean)).sum::<S>();
    Ok((ss / S::from_usize_(n - 1)).sqrt())
}

/// Excess kurtosis (zero for a Normal sample).
pub fn excess_kurtosis<S: Real>(sample: &[S]) -> Result<S, AnalyticsError> {
    let n = sample.len();
    if n < 4 {
        return Err(AnalyticsError::SeriesTooShort { need: 4, got: n });
    }
    let nf = S::from_usize_(n);
    let mean = sample.iter().copied().sum::<S>() / nf;
    let m2 = sample.iter().map(|&x| (x - mean) * (x - mean)).sum::<S>() / nf;
    if m2 == S::zero() {
        return Err(AnalyticsError::ConstantSeries);
    }
    let m4 = sample.iter().map(|&x| (x - mean).powi(4)).sum::<S>() / nf;
    Ok(m4 / (m2 * m2) - S::from_f64_(3.0))
}

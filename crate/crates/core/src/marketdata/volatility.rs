use serde::{Deserialize, Serialize};

use super::{require_bars, PriceSeries};
use crate::error::{Error, Result};

pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;
pub const DEFAULT_DROP_THRESHOLD: f64 = 0.75;

pub fn log_returns(closes: &[f64]) -> Vec<f64> {
    closes.windows(2).map(|w| (w[1] / w[0]).ln()).collect()
}

/// Annualized sample standard deviation of close-to-close log returns.
pub fn realized_volatility(closes: &[f64]) -> f64 {
    let returns = log_returns(closes);
    let n = returns.len();
    if n < 2 {
        return 0.0;
    }
    let mean = returns.iter().sum::<f64>() / n as f64;
    let ss: f64 = returns.iter().map(|r| (r - mean) * (r - mean)).sum();
    (ss / (n - 1) as f64).sqrt() * TRADING_DAYS_PER_YEAR.sqrt()
}

/// Realized volatility over the trailing `window` bars.
pub fn estimate_volatility(series: &PriceSeries, window: usize) -> Result<f64> {
    if window < 2 {
        return Err(Error::invalid("window", window as f64, "must be >= 2"));
    }
    require_bars(series, window)?;
    let closes = series.closes();
    Ok(realized_volatility(&closes[closes.len() - window..]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolatilityDrop {
    pub sigma_before: f64,
    pub sigma_after: f64,
    /// `sigma_after / sigma_before`, in `(0, 1)`.
    pub ratio: f64,
    /// Index of the last bar of the short window.
    pub at: usize,
}

/// `after/before ≤ threshold` with both volatilities positive.
pub fn is_volatility_drop(before: f64, after: f64, threshold: f64) -> bool {
    before > 0.0 && after > 0.0 && after / before <= threshold && after < before
}

/// Scans every bar for a short-window volatility well below the long-window
/// volatility that ended one short window earlier.
pub fn detect_vol_drop(
    series: &PriceSeries,
    long_window: usize,
    short_window: usize,
    ratio_threshold: f64,
) -> Result<Vec<VolatilityDrop>> {
    if short_window < 2 {
        return Err(Error::invalid(
            "short_window",
            short_window as f64,
            "must be >= 2",
        ));
    }
    if long_window <= short_window {
        return Err(Error::invalid(
            "long_window",
            long_window as f64,
            "must exceed short_window",
        ));
    }
    if !(ratio_threshold > 0.0 && ratio_threshold < 1.0) {
        return Err(Error::invalid(
            "ratio_threshold",
            ratio_threshold,
            "must be in (0, 1)",
        ));
    }
    require_bars(series, long_window + short_window)?;

    let closes = series.closes();
    let mut drops = Vec::new();
    for end in long_window + short_window - 1..closes.len() {
        let short_start = end + 1 - short_window;
        let before = realized_volatility(&closes[short_start - long_window..short_start]);
        let after = realized_volatility(&closes[short_start..=end]);
        if is_volatility_drop(before, after, ratio_threshold) {
            drops.push(VolatilityDrop {
                sigma_before: before,
                sigma_after: after,
                ratio: after / before,
                at: end,
            });
        }
    }
    Ok(drops)
}

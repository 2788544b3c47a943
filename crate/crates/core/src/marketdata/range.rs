use serde::{Deserialize, Serialize};

use super::{require_bars, PriceSeries};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeOptions {
    /// Trailing window length in bars (≥ 5).
    pub window: usize,
    /// Quantiles of lows and highs taken as support and resistance.
    pub band_quantiles: (f64, f64),
    /// Minimum flatness for a detection.
    pub flatness_threshold: f64,
}

impl Default for RangeOptions {
    fn default() -> Self {
        Self {
            window: 20,
            band_quantiles: (0.05, 0.95),
            flatness_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeDetection {
    pub support: f64,
    pub resistance: f64,
    /// First bar of the window.
    pub start: usize,
    /// Last bar of the window, inclusive.
    pub end: usize,
    /// `1 − |slope|·window/(resistance − support)`, clamped to `[0, 1]`.
    pub flatness: f64,
}

impl RangeDetection {
    pub fn width(&self) -> f64 {
        self.resistance - self.support
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RangeOutcome {
    Range(RangeDetection),
    /// Band found but the closes drift across it.
    Trending {
        flatness: f64,
    },
    /// Quantile band has no width.
    Degenerate,
}

/// Linear-interpolation quantile of unsorted data.
fn quantile(values: &mut [f64], q: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let pos = q * (values.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    values[lo] + (values[hi] - values[lo]) * frac
}

/// Least-squares slope of `ys` against their index.
fn slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let mean_x = (n - 1.0) / 2.0;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    sxy / sxx
}

pub fn analyze_range(series: &PriceSeries, opts: &RangeOptions) -> Result<RangeOutcome> {
    if opts.window < 5 {
        return Err(Error::invalid("window", opts.window as f64, "must be >= 5"));
    }
    let (qlo, qhi) = opts.band_quantiles;
    if !(0.0..=1.0).contains(&qlo) || !(0.0..=1.0).contains(&qhi) || qlo >= qhi {
        return Err(Error::invalid(
            "band_quantiles",
            qlo,
            "need 0 <= low < high <= 1",
        ));
    }
    require_bars(series, opts.window)?;

    let start = series.len() - opts.window;
    let bars = &series.bars()[start..];
    let mut lows: Vec<f64> = bars.iter().map(|b| b.low).collect();
    let mut highs: Vec<f64> = bars.iter().map(|b| b.high).collect();
    let support = quantile(&mut lows, qlo);
    let resistance = quantile(&mut highs, qhi);
    let width = resistance - support;
    if !(width > 0.0) {
        return Ok(RangeOutcome::Degenerate);
    }

    let closes: Vec<f64> = bars.iter().map(|b| b.close).collect();
    let flatness = (1.0 - slope(&closes).abs() * opts.window as f64 / width).clamp(0.0, 1.0);
    if flatness < opts.flatness_threshold {
        return Ok(RangeOutcome::Trending { flatness });
    }
    Ok(RangeOutcome::Range(RangeDetection {
        support,
        resistance,
        start,
        end: series.len() - 1,
        flatness,
    }))
}

pub fn detect_range(series: &PriceSeries, opts: &RangeOptions) -> Result<Option<RangeDetection>> {
    Ok(match analyze_range(series, opts)? {
        RangeOutcome::Range(d) => Some(d),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marketdata::synthetic::{self, Segment};

    #[test]
    fn quantile_interpolates() {
        let mut v = vec![4.0, 1.0, 3.0, 2.0, 5.0];
        assert_eq!(quantile(&mut v, 0.0), 1.0);
        assert_eq!(quantile(&mut v, 1.0), 5.0);
        assert_eq!(quantile(&mut v, 0.5), 3.0);
        assert!((quantile(&mut v, 0.05) - 1.2).abs() < 1e-12);
    }

    #[test]
    fn slope_of_line() {
        let ys: Vec<f64> = (0..10).map(|i| 3.0 + 0.5 * i as f64).collect();
        assert!((slope(&ys) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn flat_series_is_degenerate() {
        let s = synthetic::flat_series("F", 42.0, 30);
        assert_eq!(
            analyze_range(&s, &RangeOptions::default()).unwrap(),
            RangeOutcome::Degenerate
        );
        assert!(detect_range(&s, &RangeOptions::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn lnkd_band() {
        let s = synthetic::series("LNKD", &[Segment::banded(40, 0.47, 123.3, 127.2)]);
        let d = detect_range(&s, &RangeOptions::default()).unwrap().unwrap();
        assert!((d.support - 123.3).abs() < 1e-9);
        assert!((d.resistance - 127.2).abs() < 1e-9);
        assert!((d.width() - 3.9).abs() < 1e-9);
        assert_eq!(d.end, 39);
        assert_eq!(d.start, 20);
        assert!(d.support < d.resistance);
    }

    #[test]
    fn trend_is_rejected() {
        let s = synthetic::series("UP", &[Segment::free(40, 0.2, 50.0).with_drift(0.01)]);
        assert!(matches!(
            analyze_range(&s, &RangeOptions::default()).unwrap(),
            RangeOutcome::Trending { .. }
        ));
    }

    #[test]
    fn argument_errors() {
        let s = synthetic::flat_series("F", 42.0, 30);
        let bad_window = RangeOptions {
            window: 4,
            ..RangeOptions::default()
        };
        assert!(analyze_range(&s, &bad_window).is_err());
        let long = RangeOptions {
            window: 31,
            ..RangeOptions::default()
        };
        assert!(matches!(
            analyze_range(&s, &long),
            Err(Error::InsufficientData { .. })
        ));
        let bad_q = RangeOptions {
            band_quantiles: (0.9, 0.1),
            ..RangeOptions::default()
        };
        assert!(analyze_range(&s, &bad_q).is_err());
    }
}

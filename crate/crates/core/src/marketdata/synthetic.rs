//! Deterministic OHLC fixtures with prescribed realized volatility.
//!
//! Closes in a segment alternate between two levels (plus an optional log
//! drift), so every window of a given length has the same sample standard
//! deviation of log returns. The alternation amplitude is solved so that
//! the realized volatility over `calibration_window` bars equals the target.

use std::fmt::Write;

use chrono::{Datelike, Days, NaiveDate, Weekday};

use super::{realized_volatility, Bar, PriceSeries};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub bars: usize,
    pub sigma: f64,
    /// Lower alternation level for free segments.
    pub base: f64,
    /// Log drift per bar.
    pub drift: f64,
    /// Pins every bar's low and high to `(support, resistance)`.
    pub band: Option<(f64, f64)>,
    /// Window length the volatility is exact over; defaults to `bars`.
    pub calibration_window: Option<usize>,
}

impl Segment {
    pub fn free(bars: usize, sigma: f64, base: f64) -> Self {
        Self {
            bars,
            sigma,
            base,
            drift: 0.0,
            band: None,
            calibration_window: None,
        }
    }

    pub fn banded(bars: usize, sigma: f64, support: f64, resistance: f64) -> Self {
        Self {
            bars,
            sigma,
            base: support,
            drift: 0.0,
            band: Some((support, resistance)),
            calibration_window: None,
        }
    }

    pub fn with_drift(mut self, drift: f64) -> Self {
        self.drift = drift;
        self
    }

    pub fn calibrated_to(mut self, window: usize) -> Self {
        self.calibration_window = Some(window);
        self
    }

    /// Log amplitude of the alternation.
    fn amplitude(&self) -> f64 {
        let window = self.calibration_window.unwrap_or(self.bars).max(3);
        let unit: Vec<f64> = (0..window).map(|j| ((j % 2) as f64).exp()).collect();
        self.sigma / realized_volatility(&unit)
    }
}

/// Weekdays from 2013-01-02.
fn trading_dates(n: usize) -> Vec<NaiveDate> {
    let mut d = NaiveDate::from_ymd_opt(2013, 1, 2).expect("valid date");
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

pub fn try_series(symbol: &str, segments: &[Segment]) -> Result<PriceSeries> {
    let total: usize = segments.iter().map(|s| s.bars).sum();
    let dates = trading_dates(total);
    let mut bars = Vec::with_capacity(total);
    let mut prev_close: Option<f64> = None;

    for seg in segments {
        if !(seg.sigma >= 0.0) || !(seg.base > 0.0) {
            return Err(Error::invalid(
                "sigma",
                seg.sigma,
                "segment needs sigma >= 0 and base > 0",
            ));
        }
        let a = seg.amplitude();
        let base = match seg.band {
            Some((lo, hi)) => {
                let room = (hi / lo).ln() - a - seg.drift.abs() * seg.bars as f64;
                if !(room > 0.0) {
                    return Err(Error::invalid(
                        "sigma",
                        seg.sigma,
                        "alternation does not fit inside the band",
                    ));
                }
                lo * (room / 2.0).exp()
            }
            None => seg.base,
        };
        for j in 0..seg.bars {
            let close = base * (seg.drift * j as f64 + a * (j % 2) as f64).exp();
            let (low, high) = match seg.band {
                Some(band) => band,
                None => {
                    let o = prev_close.unwrap_or(close);
                    (o.min(close) / 1.002, o.max(close) * 1.002)
                }
            };
            let open = prev_close.unwrap_or(close).clamp(low, high);
            bars.push(Bar {
                date: dates[bars.len()],
                open,
                high,
                low,
                close,
                volume: 1_000_000,
            });
            prev_close = Some(close);
        }
    }
    PriceSeries::new(symbol, bars)
}

/// Panics if a banded segment cannot hold its volatility.
pub fn series(symbol: &str, segments: &[Segment]) -> PriceSeries {
    try_series(symbol, segments).expect("valid synthetic segments")
}

/// Every bar at one price, without wicks.
pub fn flat_series(symbol: &str, price: f64, bars: usize) -> PriceSeries {
    let bars = trading_dates(bars)
        .into_iter()
        .map(|date| Bar {
            date,
            open: price,
            high: price,
            low: price,
            close: price,
            volume: 1_000_000,
        })
        .collect();
    PriceSeries::new(symbol, bars).expect("positive flat price")
}

/// Renders a series in the ingestion CSV format; floats round-trip exactly.
pub fn to_csv(series: &PriceSeries) -> String {
    let mut out = String::from("date,open,high,low,close,volume\n");
    for b in series.bars() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            b.date, b.open, b.high, b.low, b.close, b.volume
        );
    }
    out
}

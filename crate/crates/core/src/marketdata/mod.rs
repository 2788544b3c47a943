//! OHLC price series and the breakout workflow built on them: realized
//! volatility, support/resistance detection, volatility-drop detection and
//! report rows with the breakout distance and probability.

mod ingest;
mod range;
mod report;
pub mod synthetic;
mod volatility;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ingest::{load_csv, parse_csv, CSV_HEADER};
pub use range::{analyze_range, detect_range, RangeDetection, RangeOptions, RangeOutcome};
pub use report::{build_report, scan_series, BreakoutReport, ReportFlag, ScanOptions};
pub use volatility::{
    detect_vol_drop, estimate_volatility, is_volatility_drop, log_returns, realized_volatility,
    VolatilityDrop, DEFAULT_DROP_THRESHOLD, TRADING_DAYS_PER_YEAR,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: u64,
}

impl Bar {
    /// Describes the first broken OHLC invariant, if any.
    pub fn violation(&self) -> Option<String> {
        for (name, v) in [
            ("open", self.open),
            ("high", self.high),
            ("low", self.low),
            ("close", self.close),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Some(format!("{name} = {v} must be a positive price"));
            }
        }
        if self.low > self.high {
            return Some(format!("low {} above high {}", self.low, self.high));
        }
        if self.low > self.open.min(self.close) {
            return Some(format!("low {} above open/close", self.low));
        }
        if self.high < self.open.max(self.close) {
            return Some(format!("high {} below open/close", self.high));
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    symbol: String,
    bars: Vec<Bar>,
}

impl PriceSeries {
    /// Takes bars in strictly increasing date order.
    pub fn new(symbol: impl Into<String>, bars: Vec<Bar>) -> Result<Self> {
        if bars.is_empty() {
            return Err(Error::EmptySeries);
        }
        for (i, bar) in bars.iter().enumerate() {
            if let Some(reason) = bar.violation() {
                return Err(Error::InvalidBar {
                    line: i as u64 + 1,
                    date: bar.date.to_string(),
                    reason,
                });
            }
        }
        if let Some(i) = bars.windows(2).position(|w| w[1].date <= w[0].date) {
            return Err(Error::DuplicateDate {
                line: i as u64 + 2,
                date: bars[i + 1].date.to_string(),
            });
        }
        Ok(Self {
            symbol: symbol.into(),
            bars,
        })
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn bars(&self) -> &[Bar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn closes(&self) -> Vec<f64> {
        self.bars.iter().map(|b| b.close).collect()
    }
}

fn require_bars(series: &PriceSeries, needed: usize) -> Result<()> {
    if series.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            available: series.len(),
        });
    }
    Ok(())
}

use serde::{Deserialize, Serialize};

use super::range::{analyze_range, RangeDetection, RangeOptions, RangeOutcome};
use super::volatility::{
    detect_vol_drop, estimate_volatility, VolatilityDrop, DEFAULT_DROP_THRESHOLD,
};
use super::PriceSeries;
use crate::barrier::transmission_wkb;
use crate::error::Result;
use crate::model::{
    barrier_geometry, classify_regime, MarketParams, RangeBound, Regime, DEFAULT_CRITICAL_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFlag {
    RangeBound,
    Critical,
    /// Either λK² above one or closes drifting through the band.
    Trending,
    /// No band of positive width in the window.
    NoRange,
}

impl From<Regime> for ReportFlag {
    fn from(r: Regime) -> Self {
        match r {
            Regime::RangeBound => ReportFlag::RangeBound,
            Regime::Critical => ReportFlag::Critical,
            Regime::Trending => ReportFlag::Trending,
        }
    }
}

impl ReportFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportFlag::RangeBound => "range_bound",
            ReportFlag::Critical => "critical",
            ReportFlag::Trending => "trending",
            ReportFlag::NoRange => "no_range",
        }
    }
}

/// One breakout row: levels, box width, penetration distance, breakout
/// probability and the volatility fall ahead of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakoutReport {
    pub symbol: String,
    /// `first..last` date of the analysed window.
    pub date: String,
    pub r: f64,
    pub sigma: Option<f64>,
    pub price_at_resistance: Option<f64>,
    pub price_at_support: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub d: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub vol_fall_before: Option<f64>,
    pub vol_fall_after: Option<f64>,
    pub regime: ReportFlag,
}

fn window_dates(series: &PriceSeries, start: usize, end: usize) -> String {
    let bars = series.bars();
    format!("{}..{}", bars[start].date, bars[end].date)
}

/// Row for a detected range; `d` and `T` come from `(r, σ, K)`. Above-barrier
/// inputs give a `trending` row with `T` empty rather than an error.
pub fn build_report(
    series: &PriceSeries,
    r: f64,
    detection: &RangeDetection,
    drop: Option<&VolatilityDrop>,
    sigma: f64,
) -> Result<BreakoutReport> {
    let params = MarketParams::new(r, sigma)?;
    let range = RangeBound::new(detection.support, detection.resistance)?;
    let geom = barrier_geometry(&params, &range);
    let regime = classify_regime(params.lambda(), &geom, DEFAULT_CRITICAL_TOLERANCE)?;
    let t = transmission_wkb(&params, &range).ok().map(|t| t.t_wkb);
    Ok(BreakoutReport {
        symbol: series.symbol().to_string(),
        date: window_dates(series, detection.start, detection.end),
        r,
        sigma: Some(sigma),
        price_at_resistance: Some(detection.resistance),
        price_at_support: Some(detection.support),
        k: Some(range.width()),
        d: Some(geom.d),
        t,
        vol_fall_before: drop.map(|d| d.sigma_before),
        vol_fall_after: drop.map(|d| d.sigma_after),
        regime: regime.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub r: f64,
    /// Fixed volatility; estimated over `sigma_window` when absent.
    pub sigma: Option<f64>,
    pub sigma_window: usize,
    pub range: RangeOptions,
    pub long_window: usize,
    pub short_window: usize,
    pub drop_threshold: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            r: 0.03,
            sigma: None,
            sigma_window: 20,
            range: RangeOptions::default(),
            long_window: 40,
            short_window: 10,
            drop_threshold: DEFAULT_DROP_THRESHOLD,
        }
    }
}

/// Full workflow for one instrument: range, volatility, strongest
/// volatility drop inside the range window, report row.
pub fn scan_series(series: &PriceSeries, opts: &ScanOptions) -> Result<BreakoutReport> {
    let outcome = analyze_range(series, &opts.range)?;
    let detection = match outcome {
        RangeOutcome::Range(d) => d,
        RangeOutcome::Trending { .. } | RangeOutcome::Degenerate => {
            let end = series.len() - 1;
            return Ok(BreakoutReport {
                symbol: series.symbol().to_string(),
                date: window_dates(series, end + 1 - opts.range.window, end),
                r: opts.r,
                sigma: None,
                price_at_resistance: None,
                price_at_support: None,
                k: None,
                d: None,
                t: None,
                vol_fall_before: None,
                vol_fall_after: None,
                regime: if matches!(outcome, RangeOutcome::Degenerate) {
                    ReportFlag::NoRange
                } else {
                    ReportFlag::Trending
                },
            });
        }
    };

    let sigma = match opts.sigma {
        Some(s) => s,
        None => estimate_volatility(series, opts.sigma_window)?,
    };
    let drop = if series.len() >= opts.long_window + opts.short_window {
        detect_vol_drop(
            series,
            opts.long_window,
            opts.short_window,
            opts.drop_threshold,
        )?
        .into_iter()
        .filter(|d| d.at >= detection.start)
        .min_by(|a, b| a.ratio.total_cmp(&b.ratio))
    } else {
        None
    };
    build_report(series, opts.r, &detection, drop.as_ref(), sigma)
}

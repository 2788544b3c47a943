//! Transmission and penetration distance over interest-rate and volatility
//! sweeps at a fixed strike.

use serde::{Deserialize, Serialize};

use crate::barrier::transmission_wkb;
use crate::batch::{self, Execution};
use crate::error::Result;
use crate::model::{barrier_geometry, MarketParams, RangeBound};

pub const DEFAULT_STRIKE: f64 = 2.40;

/// Fixed volatility of the interest-rate sweep.
pub const RATE_SWEEP_SIGMA: f64 = 0.53;
pub const RATE_SWEEP_RATES: [f64; 7] = [0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07];

/// Fixed rate of the volatility sweep.
pub const VOL_SWEEP_RATE: f64 = 0.05;
pub const VOL_SWEEP_SIGMAS: [f64; 7] = [0.43, 0.53, 0.63, 0.73, 0.83, 0.93, 0.97];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub r: f64,
    pub sigma: f64,
    #[serde(rename = "K")]
    pub strike: f64,
    /// WKB transmission coefficient in `(0, 1]`.
    #[serde(rename = "T")]
    pub t: f64,
    /// Penetration distance.
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Table {
    /// Rates 0.01..=0.07 at σ = 0.53.
    Table1,
    /// Volatilities 0.43..=0.97 at r = 0.05.
    Table2,
}

impl Table {
    pub fn grid(self) -> Vec<(f64, f64)> {
        match self {
            Table::Table1 => RATE_SWEEP_RATES
                .iter()
                .map(|&r| (r, RATE_SWEEP_SIGMA))
                .collect(),
            Table::Table2 => VOL_SWEEP_SIGMAS
                .iter()
                .map(|&s| (VOL_SWEEP_RATE, s))
                .collect(),
        }
    }
}

pub fn sweep_row(r: f64, sigma: f64, strike: f64) -> Result<SweepRow> {
    let params = MarketParams::new(r, sigma)?;
    let range = RangeBound::from_width(strike)?;
    let t = transmission_wkb(&params, &range)?;
    Ok(SweepRow {
        r,
        sigma,
        strike,
        t: t.t_wkb,
        d: barrier_geometry(&params, &range).d,
    })
}

/// Evaluates an arbitrary `(r, σ)` grid at one strike.
pub fn sweep(grid: &[(f64, f64)], strike: f64, exec: Execution) -> Result<Vec<SweepRow>> {
    batch::map(grid, exec, |&(r, s)| sweep_row(r, s, strike))
        .into_iter()
        .collect()
}

pub fn table(which: Table, strike: f64, exec: Execution) -> Result<Vec<SweepRow>> {
    sweep(&which.grid(), strike, exec)
}

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tunnelgate::marketdata::synthetic::{self, Segment};
use tunnelgate::marketdata::PriceSeries;

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tunnelgate"));
    cmd.env_remove("TUNNELGATE_CONFIG");
    cmd
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn tunnelgate")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad json ({e}): {}", stdout(out)))
}

/// Reference instrument: published inputs and outputs.
#[derive(Debug, Clone, Copy)]
pub struct Instrument {
    pub symbol: &'static str,
    pub r: f64,
    pub sigma: f64,
    pub resistance: f64,
    pub support: f64,
    pub d: f64,
    pub d_tol: f64,
    pub t: f64,
    /// Printed volatility before and after the fall.
    pub fall: (f64, f64),
}

pub const INSTRUMENTS: [Instrument; 4] = [
    Instrument {
        symbol: "LNKD",
        r: 0.03,
        sigma: 0.47,
        resistance: 127.2,
        support: 123.3,
        d: 0.058114,
        d_tol: 5e-7,
        t: 0.998675,
        fall: (0.63, 0.39),
    },
    Instrument {
        symbol: "GOOG",
        r: 0.03,
        sigma: 0.15,
        resistance: 704.7,
        support: 702.6,
        d: 0.136068,
        d_tol: 5e-7,
        t: 0.95,
        fall: (0.40, 0.15),
    },
    Instrument {
        symbol: "HUM",
        r: 0.03,
        sigma: 0.31,
        resistance: 70.08,
        support: 66.95,
        d: 0.08455,
        d_tol: 5e-6,
        t: 0.9948,
        fall: (0.43, 0.25),
    },
    Instrument {
        symbol: "NFLX",
        r: 0.03,
        sigma: 0.55,
        resistance: 101.17,
        support: 97.81,
        d: 0.921744,
        d_tol: 5e-7,
        t: 0.933,
        fall: (0.95, 0.55),
    },
];

/// Forty free bars at the pre-fall volatility, then twenty bars pinned to the
/// printed levels. The band carries the post-fall volatility when it fits and
/// a quiet alternation otherwise.
pub fn fixture(inst: &Instrument) -> PriceSeries {
    let base = inst.support * 0.97;
    let before = Segment::free(40, inst.fall.0, base).calibrated_to(40);
    let banded = Segment::banded(20, inst.fall.1, inst.support, inst.resistance).calibrated_to(10);
    synthetic::try_series(inst.symbol, &[before, banded]).unwrap_or_else(|_| {
        let quiet = (inst.resistance / inst.support).ln() * 5.0;
        synthetic::series(
            inst.symbol,
            &[
                before,
                Segment::banded(20, quiet, inst.support, inst.resistance),
            ],
        )
    })
}

/// Free-running series whose volatility falls from `before` to `after`.
pub fn fall_series(before: f64, after: f64) -> PriceSeries {
    synthetic::series(
        "FALL",
        &[
            Segment::free(40, before, 100.0).calibrated_to(40),
            Segment::free(10, after, 100.0).calibrated_to(10),
        ],
    )
}

pub fn write_csv(dir: &Path, series: &PriceSeries) -> PathBuf {
    let path = dir.join(format!("{}.csv", series.symbol()));
    std::fs::write(&path, synthetic::to_csv(series)).expect("write fixture");
    path
}

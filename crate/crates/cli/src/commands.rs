use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tunnelgate::barrier::{transmission_wkb, wave_numbers};
use tunnelgate::batch::{self, Execution};
use tunnelgate::marketdata::{load_csv, scan_series, BreakoutReport};
use tunnelgate::model::{
    barrier_geometry, classify_regime, strike_bound, time_decay, MarketParams, RangeBound, Regime,
};
use tunnelgate::spectral::{mode_eigenvalue, mode_value, StationaryMode};
use tunnelgate::sweep::{self, Table};
use tunnelgate::verify::{run_verification, VerifyOptions};
use tunnelgate::Error;

use crate::config::RunConfig;
use crate::output::{Format, Records};
use crate::{Command, RateArgs, ScanArgs, TableChoice, VerifyArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_REGIME: u8 = 3;

enum Failure {
    Usage(String),
    Regime(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::AboveBarrier { .. } => Failure::Regime(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

pub fn run(command: &Command, config: &RunConfig, format: Format, out: &mut impl Write) -> u8 {
    let result = match command {
        Command::Lambda(rate) => lambda(rate, config),
        Command::Decay { rate, t } => decay(rate, *t, config),
        Command::Geometry {
            rate,
            strike,
            tolerance,
        } => geometry(
            rate,
            *strike,
            tolerance.unwrap_or(config.critical_tolerance),
            config,
        ),
        Command::Transmit { rate, strike } => transmit(rate, *strike, config),
        Command::Modes {
            rate,
            strike,
            count,
            at,
        } => modes(rate, *strike, *count, *at, config),
        Command::Tables { which, strike } => tables(*which, *strike),
        Command::Scan(args) => scan(args, config),
        Command::Verify(args) => verify(args, config, format, out),
    };
    match result {
        Ok(Some(records)) => match records.render(format, out) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: writing output: {e}");
                EXIT_USAGE
            }
        },
        Ok(None) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Regime(msg)) => {
            eprintln!("regime error: {msg}");
            EXIT_REGIME
        }
        Err(Failure::Verify) => EXIT_VERIFY,
    }
}

type Outcome = Result<Option<Records>, Failure>;

fn params(rate: &RateArgs, config: &RunConfig) -> Result<MarketParams, Failure> {
    Ok(MarketParams::new(rate.r.unwrap_or(config.r), rate.sigma)?)
}

#[derive(Serialize)]
struct LambdaOut {
    r: f64,
    sigma: f64,
    lambda: f64,
}

fn lambda(rate: &RateArgs, config: &RunConfig) -> Outcome {
    let p = params(rate, config)?;
    Ok(Some(Records::one(&LambdaOut {
        r: p.r(),
        sigma: p.sigma(),
        lambda: p.lambda().value(),
    })))
}

#[derive(Serialize)]
struct DecayOut {
    r: f64,
    sigma: f64,
    t: f64,
    lambda: f64,
    decay: f64,
}

fn decay(rate: &RateArgs, t: f64, config: &RunConfig) -> Outcome {
    let p = params(rate, config)?;
    Ok(Some(Records::one(&DecayOut {
        r: p.r(),
        sigma: p.sigma(),
        t,
        lambda: p.lambda().value(),
        decay: time_decay(&p, t)?,
    })))
}

#[derive(Serialize)]
struct GeometryOut {
    r: f64,
    sigma: f64,
    #[serde(rename = "K")]
    strike: f64,
    lambda: f64,
    #[serde(rename = "lambda_K2")]
    lambda_k2: f64,
    #[serde(rename = "V0")]
    v0: f64,
    #[serde(rename = "S_r")]
    s_r: f64,
    d: f64,
    strike_bound: f64,
    regime: Regime,
}

fn geometry(rate: &RateArgs, strike: f64, tolerance: f64, config: &RunConfig) -> Outcome {
    let p = params(rate, config)?;
    let range = RangeBound::from_width(strike)?;
    let g = barrier_geometry(&p, &range);
    let l = p.lambda();
    Ok(Some(Records::one(&GeometryOut {
        r: p.r(),
        sigma: p.sigma(),
        strike,
        lambda: l.value(),
        lambda_k2: g.lambda_k2(l),
        v0: g.v0,
        s_r: g.s_r,
        d: g.d,
        strike_bound: strike_bound(l),
        regime: classify_regime(l, &g, tolerance)?,
    })))
}

#[derive(Serialize)]
struct TransmitOut {
    r: f64,
    sigma: f64,
    #[serde(rename = "K")]
    strike: f64,
    lambda: f64,
    #[serde(rename = "V0")]
    v0: f64,
    #[serde(rename = "S_r")]
    s_r: f64,
    d: f64,
    k: f64,
    q: f64,
    wkb_exponent: f64,
    #[serde(rename = "T_wkb")]
    t_wkb: f64,
    #[serde(rename = "T_exact")]
    t_exact: f64,
    #[serde(rename = "T_thick")]
    t_thick: f64,
}

fn transmit(rate: &RateArgs, strike: f64, config: &RunConfig) -> Outcome {
    let p = params(rate, config)?;
    let range = RangeBound::from_width(strike)?;
    let t = transmission_wkb(&p, &range)?;
    let g = barrier_geometry(&p, &range);
    let w = wave_numbers(&p, p.lambda(), g.v0)?;
    Ok(Some(Records::one(&TransmitOut {
        r: p.r(),
        sigma: p.sigma(),
        strike,
        lambda: p.lambda().value(),
        v0: g.v0,
        s_r: g.s_r,
        d: g.d,
        k: w.k,
        q: w.q,
        wkb_exponent: t.wkb_exponent,
        t_wkb: t.t_wkb,
        t_exact: t.t_exact,
        t_thick: t.t_thick,
    })))
}

#[derive(Serialize)]
struct ModeOut {
    n: u32,
    #[serde(rename = "K")]
    strike: f64,
    amplitude: f64,
    eigenvalue: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    at: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
}

fn modes(rate: &RateArgs, strike: f64, count: u32, at: Option<f64>, config: &RunConfig) -> Outcome {
    let p = params(rate, config)?;
    if count == 0 {
        return Err(Failure::Usage("`--count` must be >= 1".into()));
    }
    let rows = (1..=count)
        .map(|n| {
            let mode = StationaryMode::new(n, strike)?;
            Ok(ModeOut {
                n,
                strike,
                amplitude: mode.amplitude(),
                eigenvalue: mode_eigenvalue(&p, &mode),
                at,
                value: at.map(|s| mode_value(&mode, s)).transpose()?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Some(Records::many(&rows)))
}

#[derive(Serialize)]
struct TableRowOut {
    r: f64,
    sigma: f64,
    #[serde(rename = "K")]
    strike: f64,
    #[serde(rename = "T")]
    t: f64,
    /// T in percent, rounded to two decimals for display.
    #[serde(rename = "T_pct")]
    t_pct: f64,
    d: f64,
}

fn tables(which: TableChoice, strike: f64) -> Outcome {
    let table = match which {
        TableChoice::Table1 => Table::Table1,
        TableChoice::Table2 => Table::Table2,
    };
    if !(strike.is_finite() && strike > 0.0) {
        return Err(Failure::Usage(format!(
            "`--strike` must be > 0, got {strike}"
        )));
    }
    let rows: Vec<TableRowOut> = sweep::table(table, strike, Execution::Parallel)?
        .into_iter()
        .map(|row| TableRowOut {
            r: row.r,
            sigma: row.sigma,
            strike: row.strike,
            t: row.t,
            t_pct: (row.t * 10_000.0).round() / 100.0,
            d: row.d,
        })
        .collect();
    Ok(Some(Records::many(&rows)))
}

fn csv_inputs(paths: &[PathBuf]) -> Vec<PathBuf> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = walkdir::WalkDir::new(path)
                .into_iter()
                .filter_map(Result::ok)
                .filter(|e| e.file_type().is_file())
                .map(|e| e.into_path())
                .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    files
}

fn scan_one(
    path: &Path,
    opts: &tunnelgate::marketdata::ScanOptions,
) -> Result<BreakoutReport, String> {
    let series = load_csv(path).map_err(|e| format!("{}: {e}", path.display()))?;
    scan_series(&series, opts).map_err(|e| format!("{}: {e}", path.display()))
}

fn scan(args: &ScanArgs, config: &RunConfig) -> Outcome {
    let mut cfg = config.clone();
    if let Some(r) = args.r {
        cfg.r = r;
    }
    cfg.range_window = args.range_window.unwrap_or(cfg.range_window);
    cfg.sigma_window = args.sigma_window.unwrap_or(cfg.sigma_window);
    cfg.long_window = args.long_window.unwrap_or(cfg.long_window);
    cfg.short_window = args.short_window.unwrap_or(cfg.short_window);
    cfg.drop_threshold = args.drop_threshold.unwrap_or(cfg.drop_threshold);
    cfg.flatness_threshold = args.flatness.unwrap_or(cfg.flatness_threshold);
    cfg.validate().map_err(Failure::Usage)?;
    if let Some(s) = args.sigma {
        MarketParams::new(cfg.r, s)?;
    }
    let opts = cfg.scan_options(args.sigma);

    let files = csv_inputs(&args.paths);
    if files.is_empty() {
        return Err(Failure::Usage("no input CSV files".into()));
    }
    let results = batch::map(&files, Execution::Parallel, |p| scan_one(p, &opts));
    let mut rows = Vec::new();
    for res in results {
        match res {
            Ok(row) => rows.push(row),
            Err(msg) => eprintln!("error: {msg}"),
        }
    }
    if rows.is_empty() {
        return Err(Failure::Usage("every input failed".into()));
    }
    Ok(Some(Records::many(&rows)))
}

fn verify(args: &VerifyArgs, config: &RunConfig, format: Format, out: &mut impl Write) -> Outcome {
    let opts = VerifyOptions {
        samples: args.samples.unwrap_or(config.samples),
        seed: args.seed.unwrap_or(config.seed),
        quad_tol: args.quad_tol.unwrap_or(config.quad_tol),
        negative_control: args.negative_control,
        exec: if args.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    if !(opts.quad_tol.is_finite() && opts.quad_tol > 0.0) {
        return Err(Failure::Usage(format!(
            "`--quad-tol` must be > 0, got {}",
            opts.quad_tol
        )));
    }
    if opts.samples == 0 {
        return Err(Failure::Usage("`--samples` must be >= 1".into()));
    }
    let summary = run_verification(&opts);
    let records = match format {
        Format::Json => Records::one(&summary),
        _ => Records::many(&summary.checks),
    };
    records
        .render(format, out)
        .map_err(|e| Failure::Usage(format!("writing output: {e}")))?;
    for check in &summary.checks {
        eprintln!(
            "{} {}: {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    if summary.all_passed() {
        Ok(None)
    } else {
        Err(Failure::Verify)
    }
}

//! `tunnelgate`: breakout probabilities for range-bound stocks.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{RunConfig, CONFIG_ENV};
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "tunnelgate",
    version,
    about = "Breakout probabilities for range-bound stocks"
)]
pub struct Cli {
    /// Output format (default: table, or the config file's `format`).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// JSON run configuration.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Annualized risk-free rate (default from config).
    #[arg(long)]
    r: Option<f64>,
    /// Annualized volatility.
    #[arg(long)]
    sigma: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TableChoice {
    /// Rates 0.01..0.07 at sigma 0.53.
    Table1,
    /// Volatilities 0.43..0.97 at r 0.05.
    Table2,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Separation constant lambda = r/sigma.
    Lambda(RateArgs),
    /// Option value decay factor exp(-lambda t).
    Decay {
        #[command(flatten)]
        rate: RateArgs,
        /// Time in years.
        #[arg(long)]
        t: f64,
    },
    /// Potential at the strike, exit price, penetration distance and regime.
    Geometry {
        #[command(flatten)]
        rate: RateArgs,
        /// Strike, i.e. resistance minus support.
        #[arg(long)]
        strike: f64,
        /// Relative band around lambda = V0 reported as critical.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Exact, WKB and thick-wall transmission coefficients.
    Transmit {
        #[command(flatten)]
        rate: RateArgs,
        #[arg(long)]
        strike: f64,
    },
    /// Stationary box modes with their eigenvalues.
    Modes {
        #[command(flatten)]
        rate: RateArgs,
        #[arg(long)]
        strike: f64,
        /// Number of modes.
        #[arg(long, default_value_t = 3)]
        count: u32,
        /// Also evaluate each mode at this price offset from support.
        #[arg(long)]
        at: Option<f64>,
    },
    /// Transmission and penetration sweeps over rate or volatility.
    Tables {
        #[arg(value_enum)]
        which: TableChoice,
        #[arg(long, default_value_t = tunnelgate::sweep::DEFAULT_STRIKE)]
        strike: f64,
    },
    /// Breakout report rows for OHLC CSV files or directories of them.
    Scan(ScanArgs),
    /// Run the numerical oracles against the closed forms.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// CSV files or directories.
    paths: Vec<PathBuf>,
    #[arg(long)]
    r: Option<f64>,
    /// Fixed volatility instead of the realized estimate.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    range_window: Option<usize>,
    #[arg(long)]
    sigma_window: Option<usize>,
    #[arg(long)]
    long_window: Option<usize>,
    #[arg(long)]
    short_window: Option<usize>,
    #[arg(long)]
    drop_threshold: Option<f64>,
    #[arg(long)]
    flatness: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Absolute tolerance of the quadrature.
    #[arg(long)]
    quad_tol: Option<f64>,
    /// Random parameter sets in the agreement sweep.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also run the inconsistent time-factor residual study.
    #[arg(long)]
    negative_control: bool,
    /// Disable data parallelism.
    #[arg(long)]
    sequential: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: config {e}");
                return ExitCode::from(commands::EXIT_USAGE);
            }
        },
        None => RunConfig::default(),
    };
    let format = cli.format.unwrap_or(config.format);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    ExitCode::from(commands::run(&cli.command, &config, format, &mut out))
}

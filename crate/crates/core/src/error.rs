use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// λ ≥ V₀: the price sits above the wall and nothing tunnels.
    #[error("above-barrier regime: lambda*K^2 = {lambda_k2} >= 1, no tunnelling")]
    AboveBarrier { lambda_k2: f64 },

    #[error("`{name}` = {value} outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error(
        "quadrature tolerance not met: error estimate {achieved:e} > {requested:e} \
         after {evaluations} evaluations"
    )]
    ToleranceNotMet {
        achieved: f64,
        requested: f64,
        evaluations: usize,
    },

    #[error("ODE step failure at S = {at}: {reason}")]
    StepFailure { at: f64, reason: &'static str },

    #[error("mismatched grid: {0}")]
    MismatchedGrid(String),

    #[error("insufficient data: need {needed} bars, have {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: bar {date}: {reason}")]
    InvalidBar {
        line: u64,
        date: String,
        reason: String,
    },

    #[error("line {line}: duplicate date {date}")]
    DuplicateDate { line: u64, date: String },

    #[error("price series is empty")]
    EmptySeries,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}

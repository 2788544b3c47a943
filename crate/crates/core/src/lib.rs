//! Breakout probabilities for stocks trading in a support/resistance range.
//!
//! With the price confined between two levels, the Black-Scholes equation
//! separates into a time factor and a stationary equation in price that has
//! the shape of a Schrödinger equation with potential `1/S²`. The resistance
//! level acts as a potential wall; the probability of the price tunnelling
//! through it is the transmission coefficient.
//!
//! Module map:
//!
//! * [`model`]: market parameters, separation constant, time decay, barrier
//!   geometry and regime classification.
//! * [`spectral`]: the φ ↔ ψ change of variables and the stationary box modes.
//! * [`barrier`]: wave numbers, amplitude matching, exact, thick-barrier and
//!   WKB transmission.
//! * [`verify`]: independent numerical oracles (adaptive quadrature, ODE
//!   integration, Black-Scholes PDE residuals).
//! * [`marketdata`]: OHLC ingestion, realized volatility, range and
//!   volatility-drop detection, breakout reports.
//! * [`sweep`]: parameter sweeps (interest-rate and volatility tables).
//! * [`batch`]: data-parallel map with a sequential fallback.

// NaN has to fail validation, so negated float comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod batch;
pub mod error;
pub mod marketdata;
pub mod model;
pub mod spectral;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use model::{Lambda, MarketParams, RangeBound};

//! Change of variables between the option value φ and the standard-form
//! function ψ, and the stationary modes of the price box.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MarketParams;

/// Power `r/σ²` in `φ = ψ · S^(−r/σ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformExponent(f64);

impl TransformExponent {
    pub fn from_params(params: &MarketParams) -> Self {
        Self(params.r() / (params.sigma() * params.sigma()))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_price(s: f64) -> Result<()> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::Domain {
            name: "S",
            value: s,
            domain: "(0, inf)",
        });
    }
    Ok(())
}

/// `φ(S) = ψ(S) · S^(−r/σ²)`.
pub fn phi_from_psi(params: &MarketParams, psi: f64, s: f64) -> Result<f64> {
    check_price(s)?;
    Ok(psi * s.powf(-TransformExponent::from_params(params).value()))
}

/// `ψ(S) = φ(S) · S^(r/σ²)`.
pub fn psi_from_phi(params: &MarketParams, phi: f64, s: f64) -> Result<f64> {
    check_price(s)?;
    Ok(phi * s.powf(TransformExponent::from_params(params).value()))
}

/// Mode `n` of a box of width `K`: `√(2/K) sin(nπS/K)`, vanishing at
/// support (`S = 0`) and resistance (`S = K`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryMode {
    n: u32,
    width: f64,
    amplitude: f64,
}

impl StationaryMode {
    pub fn new(n: u32, width: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", 0.0, "mode index starts at 1"));
        }
        if !width.is_finite() || width <= 0.0 {
            return Err(Error::invalid("strike", width, "must be finite and > 0"));
        }
        Ok(Self {
            n,
            width,
            amplitude: (2.0 / width).sqrt(),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Angular frequency `nπ/K`.
    pub fn wave_number(&self) -> f64 {
        f64::from(self.n) * PI / self.width
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        mode_value(self, s)
    }
}

pub fn mode_value(mode: &StationaryMode, s: f64) -> Result<f64> {
    if !(0.0..=mode.width).contains(&s) {
        return Err(Error::Domain {
            name: "S",
            value: s,
            domain: "[0, K]",
        });
    }
    Ok(mode.amplitude * (mode.wave_number() * s).sin())
}

/// Eigenvalue of `−(σ⁴/(r(σ²+r))) d²/dS²` on the box with zero potential,
/// `(σ⁴/(r(σ²+r)))·(nπ/K)²`.
pub fn mode_eigenvalue(params: &MarketParams, mode: &StationaryMode) -> f64 {
    let kn = mode.wave_number();
    kn * kn / params.kinetic_factor()
}

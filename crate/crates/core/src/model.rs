//! Market parameters and the closed-form scalars of the separated model.
//!
//! Prices are measured from the support level, so the box runs from `0` to
//! the strike `K`, which sits on the resistance level. Rates and volatilities
//! are annualized decimal fractions; times are in years.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative band around `λ = V₀` classified as [`Regime::Critical`].
pub const DEFAULT_CRITICAL_TOLERANCE: f64 = 1e-9;

/// Risk-free rate and volatility, the only exogenous inputs of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarketParams {
    r: f64,
    sigma: f64,
}

impl MarketParams {
    pub fn new(r: f64, sigma: f64) -> Result<Self> {
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::invalid("r", r, "must be finite and > 0"));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::invalid("sigma", sigma, "must be finite and > 0"));
        }
        Ok(Self { r, sigma })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> Lambda {
        compute_lambda(self)
    }

    /// `r(σ² + r)/σ⁴`, the factor converting `V − λ` into a squared wave number.
    pub fn kinetic_factor(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        self.r * (s2 + self.r) / (s2 * s2)
    }
}

impl<'de> Deserialize<'de> for MarketParams {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            r: f64,
            sigma: f64,
        }
        let raw = Raw::deserialize(de)?;
        MarketParams::new(raw.r, raw.sigma).map_err(serde::de::Error::custom)
    }
}

/// Separation constant shared by the time factor and the price equation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Lambda(f64);

impl Lambda {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::invalid("lambda", value, "must be finite and > 0"));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// λ = r/σ.
pub fn compute_lambda(params: &MarketParams) -> Lambda {
    Lambda(params.r / params.sigma)
}

/// Option value decay factor `exp(-(r/σ) t)`.
pub fn time_decay(params: &MarketParams, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid("t", t, "must be finite and >= 0"));
    }
    Ok((-compute_lambda(params).value() * t).exp())
}

/// Support and resistance levels; their distance is the box width `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangeBound {
    support: f64,
    resistance: f64,
}

impl RangeBound {
    pub fn new(support: f64, resistance: f64) -> Result<Self> {
        if !support.is_finite() {
            return Err(Error::invalid("support", support, "must be finite"));
        }
        if !resistance.is_finite() || resistance <= support {
            return Err(Error::invalid(
                "resistance",
                resistance,
                "must be finite and above support",
            ));
        }
        Ok(Self {
            support,
            resistance,
        })
    }

    /// Range in shifted coordinates: support at 0, resistance (and strike) at `width`.
    pub fn from_width(width: f64) -> Result<Self> {
        if !width.is_finite() || width <= 0.0 {
            return Err(Error::invalid("strike", width, "must be finite and > 0"));
        }
        Ok(Self {
            support: 0.0,
            resistance: width,
        })
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn resistance(&self) -> f64 {
        self.resistance
    }

    /// `K = resistance − support`.
    pub fn width(&self) -> f64 {
        self.resistance - self.support
    }
}

/// Shape of the potential wall at the strike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierGeometry {
    /// Potential at the strike, `1/K²`.
    pub v0: f64,
    /// Price where the potential drops to λ, `√(1/λ)`.
    pub s_r: f64,
    /// Penetration distance `s_r − K`. Non-positive outside the range-bound regime.
    pub d: f64,
    /// Strike (box width) the geometry was built for.
    pub strike: f64,
}

impl BarrierGeometry {
    /// `λK²`; below one exactly when the price is confined.
    pub fn lambda_k2(&self, lambda: Lambda) -> f64 {
        lambda.value() * self.strike * self.strike
    }
}

pub fn barrier_geometry(params: &MarketParams, range: &RangeBound) -> BarrierGeometry {
    let k = range.width();
    let s_r = strike_bound(compute_lambda(params));
    BarrierGeometry {
        v0: 1.0 / (k * k),
        s_r,
        d: s_r - k,
        strike: k,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// λ < V₀: the price is trapped and can only tunnel out.
    RangeBound,
    /// λ within the tolerance band around V₀.
    Critical,
    /// λ > V₀: the price runs over the wall.
    Trending,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::RangeBound => "range_bound",
            Regime::Critical => "critical",
            Regime::Trending => "trending",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Compares λ against `V₀` with a relative `tolerance`.
pub fn classify_regime(
    lambda: Lambda,
    geometry: &BarrierGeometry,
    tolerance: f64,
) -> Result<Regime> {
    if !tolerance.is_finite() || tolerance < 0.0 {
        return Err(Error::invalid(
            "tolerance",
            tolerance,
            "must be finite and >= 0",
        ));
    }
    let l = lambda.value();
    let v0 = geometry.v0;
    Ok(if l > v0 * (1.0 + tolerance) {
        Regime::Trending
    } else if l < v0 * (1.0 - tolerance) {
        Regime::RangeBound
    } else {
        Regime::Critical
    })
}

/// Largest strike that keeps `λ < V₀`, i.e. `√(1/λ)`.
pub fn strike_bound(lambda: Lambda) -> f64 {
    (1.0 / lambda.value()).sqrt()
}

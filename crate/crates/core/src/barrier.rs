//! Tunnelling through the resistance wall.
//!
//! Inside the box the stationary function oscillates with wave number `k`;
//! inside the wall it decays at rate `q`. Continuity of the function and its
//! derivative at the wall fixes the amplitude ratio `|A|²/|F|²`, whose inverse
//! is the transmission coefficient. The WKB form replaces the rectangular
//! wall by the decaying potential `1/S²` and integrates `q(S)` from the
//! strike to the exit price.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{barrier_geometry, Lambda, MarketParams, RangeBound};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveNumbers {
    /// Oscillatory wave number inside the box, `√(c λ)`.
    pub k: f64,
    /// Decay rate inside the wall, `√(c (V − λ))`.
    pub q: f64,
    /// Shared prefactor `c = r(σ²+r)/σ⁴`.
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmissionResult {
    /// Rectangular wall of height `V₀` and width `d`.
    pub t_exact: f64,
    /// `exp(-wkb_exponent)`.
    pub t_wkb: f64,
    /// `exp(-2 q d)`.
    pub t_thick: f64,
    /// `2 ∫ q(S) dS` from the strike to the exit price.
    pub wkb_exponent: f64,
}

pub fn wave_numbers(params: &MarketParams, lambda: Lambda, potential: f64) -> Result<WaveNumbers> {
    let l = lambda.value();
    if !potential.is_finite() {
        return Err(Error::invalid("V", potential, "must be finite"));
    }
    if potential <= l {
        return Err(Error::AboveBarrier {
            lambda_k2: l / potential,
        });
    }
    let c = params.kinetic_factor();
    Ok(WaveNumbers {
        k: (c * l).sqrt(),
        q: (c * (potential - l)).sqrt(),
        c,
    })
}

/// `|A|²/|F|² = ((k²+q²)²/(4k²q²)) sinh²(qd) + 1`.
pub fn amplitude_ratio(k: f64, q: f64, d: f64) -> f64 {
    let k2 = k * k;
    let q2 = q * q;
    let s = (q * d).sinh();
    (k2 + q2).powi(2) / (4.0 * k2 * q2) * s * s + 1.0
}

fn above_barrier_check(params: &MarketParams, range: &RangeBound) -> Result<(Lambda, f64)> {
    let lambda = params.lambda();
    let k = range.width();
    let lambda_k2 = lambda.value() * k * k;
    if lambda_k2 >= 1.0 {
        return Err(Error::AboveBarrier { lambda_k2 });
    }
    Ok((lambda, k))
}

/// `T = (V₀²/(4λ(V₀−λ)) sinh²(qd) + 1)⁻¹` with `q` taken at `V₀` and `d` the
/// penetration distance.
pub fn transmission_exact(params: &MarketParams, range: &RangeBound) -> Result<f64> {
    let (lambda, _) = above_barrier_check(params, range)?;
    let geom = barrier_geometry(params, range);
    let waves = wave_numbers(params, lambda, geom.v0)?;
    let l = lambda.value();
    let v0 = geom.v0;
    let s = (waves.q * geom.d).sinh();
    Ok(1.0 / (v0 * v0 / (4.0 * l * (v0 - l)) * s * s + 1.0))
}

pub fn transmission_thick(q: f64, d: f64) -> f64 {
    (-2.0 * q * d).exp()
}

/// `artanh(u) − u`, with a series near zero where the difference cancels.
fn artanh_minus_identity(u: f64) -> f64 {
    if u < 0.1 {
        let u2 = u * u;
        let mut power = u * u2;
        let mut sum = 0.0;
        let mut n = 3.0;
        loop {
            let term = power / n;
            sum += term;
            if term <= f64::EPSILON * sum {
                return sum;
            }
            power *= u2;
            n += 2.0;
        }
    }
    u.atanh() - u
}

/// Closed-form WKB exponent `2√c (artanh(u) − u)`, `u = √(1 − λK²)`.
pub fn wkb_exponent(params: &MarketParams, range: &RangeBound) -> Result<f64> {
    let (lambda, k) = above_barrier_check(params, range)?;
    let u = (1.0 - lambda.value() * k * k).sqrt();
    Ok(2.0 * params.kinetic_factor().sqrt() * artanh_minus_identity(u))
}

/// WKB transmission, with the exact and thick-wall forms alongside.
pub fn transmission_wkb(params: &MarketParams, range: &RangeBound) -> Result<TransmissionResult> {
    let (lambda, _) = above_barrier_check(params, range)?;
    let exponent = wkb_exponent(params, range)?;
    let geom = barrier_geometry(params, range);
    let waves = wave_numbers(params, lambda, geom.v0)?;
    Ok(TransmissionResult {
        t_exact: transmission_exact(params, range)?,
        t_wkb: (-exponent).exp(),
        t_thick: transmission_thick(waves.q, geom.d),
        wkb_exponent: exponent,
    })
}

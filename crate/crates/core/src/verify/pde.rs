//! Finite-difference residual of separated solutions `w(S, t) = φ(S) e^{ρt}`
//! in the Black-Scholes equation
//! `∂w/∂t + ½σ²S² ∂²w/∂S² + rS ∂w/∂S − rw = 0`.

use serde::{Deserialize, Serialize};

use super::ode::{solve_spatial_ode, InitialData, OdeOptions, OdeSolution};
use crate::error::{Error, Result};
use crate::model::{Lambda, MarketParams};

/// Grid refinements (number of intervals over the box) used by default:
/// three successive halvings.
pub const DEFAULT_LEVELS: [usize; 4] = [32, 64, 128, 256];

/// Tolerance the study integrates φ to, well below the difference error at
/// the finest grid.
pub const STUDY_ODE_RTOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualLevel {
    pub h: f64,
    pub max_abs_residual: f64,
    pub l2_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub levels: Vec<ResidualLevel>,
    /// Smallest observed order between consecutive levels; needs ≥ 3 levels.
    pub convergence_order: Option<f64>,
}

impl ResidualReport {
    pub fn from_levels(levels: Vec<ResidualLevel>) -> Self {
        let convergence_order = if levels.len() >= 3 {
            levels
                .windows(2)
                .map(|w| {
                    (w[0].max_abs_residual / w[1].max_abs_residual).ln() / (w[0].h / w[1].h).ln()
                })
                .reduce(f64::min)
        } else {
            None
        };
        Self {
            levels,
            convergence_order,
        }
    }
}

/// Residual of `w = φ(S) e^{rate·t}` at the interior nodes of `phi` and every
/// time in `t_grid`.
///
/// `phi` must be sampled on a uniform grid of spacing `h`. Price derivatives
/// are centered; the time derivative is the fourth-order forward one-sided
/// difference with step `h`, so the spatial error dominates.
pub fn pde_residual(
    params: &MarketParams,
    rate: f64,
    phi: &OdeSolution,
    t_grid: &[f64],
    h: f64,
) -> Result<ResidualLevel> {
    let n = phi.s.len();
    if n < 3 || phi.phi.len() != n {
        return Err(Error::MismatchedGrid(format!(
            "need >= 3 matching samples, got {} prices and {} values",
            n,
            phi.phi.len()
        )));
    }
    if !(h > 0.0) {
        return Err(Error::invalid("h", h, "must be > 0"));
    }
    if t_grid.is_empty() {
        return Err(Error::MismatchedGrid("empty time grid".into()));
    }
    for w in phi.s.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(w[1].abs()) {
            return Err(Error::MismatchedGrid(format!(
                "spacing {} at S = {} differs from h = {}",
                w[1] - w[0],
                w[0],
                h
            )));
        }
    }

    let r = params.r();
    let half_var = 0.5 * params.sigma() * params.sigma();
    let mut max_abs: f64 = 0.0;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for &t in t_grid {
        let g = |i: f64| (rate * (t + i * h)).exp();
        let g0 = g(0.0);
        let dg = (-25.0 * g0 + 48.0 * g(1.0) - 36.0 * g(2.0) + 16.0 * g(3.0) - 3.0 * g(4.0))
            / (12.0 * h);
        for j in 1..n - 1 {
            let s = phi.s[j];
            let (fm, f0, fp) = (phi.phi[j - 1], phi.phi[j], phi.phi[j + 1]);
            let w_t = f0 * dg;
            let w_s = g0 * (fp - fm) / (2.0 * h);
            let w_ss = g0 * (fp - 2.0 * f0 + fm) / (h * h);
            let res = w_t + half_var * s * s * w_ss + r * s * w_s - r * f0 * g0;
            max_abs = max_abs.max(res.abs());
            sum_sq += res * res;
            count += 1;
        }
    }
    Ok(ResidualLevel {
        h,
        max_abs_residual: max_abs,
        l2_residual: (sum_sq / count as f64).sqrt(),
    })
}

/// Grid-refinement study over `[s0, s0 + width]`.
///
/// φ solves the price equation with `lambda` from `φ(s0) = 1, φ′(s0) = 0`;
/// the time factor grows at `time_rate` (equal to λ for a consistent product,
/// anything else for a negative control).
pub fn convergence_study(
    params: &MarketParams,
    lambda: Lambda,
    time_rate: f64,
    s0: f64,
    width: f64,
    levels: &[usize],
    t_grid: &[f64],
) -> Result<ResidualReport> {
    if !(width > 0.0) {
        return Err(Error::invalid("width", width, "must be > 0"));
    }
    let opts = OdeOptions::with_rtol(STUDY_ODE_RTOL);
    let init = InitialData {
        s0,
        phi0: 1.0,
        dphi0: 0.0,
    };
    let mut out = Vec::with_capacity(levels.len());
    for &intervals in levels {
        if intervals < 2 {
            return Err(Error::invalid(
                "levels",
                intervals as f64,
                "need >= 2 intervals",
            ));
        }
        let h = width / intervals as f64;
        let grid: Vec<f64> = (0..=intervals).map(|i| s0 + h * i as f64).collect();
        let phi = solve_spatial_ode(params, lambda, init, &grid, &opts)?;
        out.push(pde_residual(params, time_rate, &phi, t_grid, h)?);
    }
    Ok(ResidualReport::from_levels(out))
}

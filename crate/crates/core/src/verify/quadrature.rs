//! Adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Nodes are strictly interior, so integrands with a square-root zero at an
//! endpoint are never evaluated there. Error estimates follow the QUADPACK
//! QK15 heuristics, including the round-off floor.
#![allow(clippy::excessive_precision, clippy::needless_range_loop)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{barrier_geometry, MarketParams, RangeBound};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(center);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let value = resk * half;
    resabs *= abs_half;
    resasc *= abs_half;
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]` until the summed error estimate is at most
/// `abs_tol`, bisecting the worst segment first.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadratureResult> {
    if !abs_tol.is_finite() || abs_tol <= 0.0 {
        return Err(Error::invalid("tol", abs_tol, "must be finite and > 0"));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid(
            "bound",
            if a.is_finite() { b } else { a },
            "must be finite",
        ));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }

    let first = qk15(&f, a, b);
    let mut evaluations = 15;
    let mut error = first.error;
    let mut heap = BinaryHeap::from([first]);

    while error > abs_tol {
        if heap.len() >= max_subdivisions.max(1) {
            return Err(Error::ToleranceNotMet {
                achieved: error,
                requested: abs_tol,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // segment no longer representable
            return Err(Error::ToleranceNotMet {
                achieved: error,
                requested: abs_tol,
                evaluations,
            });
        }
        let left = qk15(&f, worst.a, mid);
        let right = qk15(&f, mid, worst.b);
        evaluations += 30;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);

        // resum occasionally to stop drift in the running total
        if heap.len() % 64 == 0 {
            error = heap.iter().map(|s| s.error).sum();
        }
    }

    let value = heap.iter().map(|s| s.value).sum();
    error = heap.iter().map(|s| s.error).sum();
    Ok(QuadratureResult {
        value,
        abs_error_estimate: error,
        evaluations,
    })
}

/// WKB exponent `2 √c ∫_K^{S_r} √(1/S² − λ) dS` by adaptive quadrature.
///
/// `tol` bounds the error of the returned exponent (prefactor included).
pub fn wkb_exponent_quadrature(
    params: &MarketParams,
    range: &RangeBound,
    tol: f64,
) -> Result<QuadratureResult> {
    wkb_exponent_quadrature_with_limit(params, range, tol, DEFAULT_MAX_SUBDIVISIONS)
}

pub fn wkb_exponent_quadrature_with_limit(
    params: &MarketParams,
    range: &RangeBound,
    tol: f64,
    max_subdivisions: usize,
) -> Result<QuadratureResult> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::invalid("tol", tol, "must be finite and > 0"));
    }
    let lambda = params.lambda().value();
    let geom = barrier_geometry(params, range);
    let lambda_k2 = geom.lambda_k2(params.lambda());
    if lambda_k2 >= 1.0 {
        return Err(Error::AboveBarrier { lambda_k2 });
    }
    let prefactor = 2.0 * params.kinetic_factor().sqrt();
    let decay = |s: f64| (1.0 / (s * s) - lambda).max(0.0).sqrt();
    let raw = integrate(
        decay,
        geom.strike,
        geom.s_r,
        tol / prefactor,
        max_subdivisions,
    )?;
    Ok(QuadratureResult {
        value: prefactor * raw.value,
        abs_error_estimate: prefactor * raw.abs_error_estimate,
        evaluations: raw.evaluations,
    })
}

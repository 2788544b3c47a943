//! Numerical oracles that check the closed forms independently.

pub mod ode;
pub mod pde;
pub mod quadrature;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::barrier::{amplitude_ratio, transmission_exact, wave_numbers, wkb_exponent};
use crate::batch::{self, Execution};
use crate::error::Result;
use crate::model::{barrier_geometry, strike_bound, MarketParams, RangeBound};

pub use ode::{solve_spatial_ode, InitialData, OdeOptions, OdeSolution};
pub use pde::{convergence_study, pde_residual, ResidualLevel, ResidualReport};
pub use quadrature::{integrate, wkb_exponent_quadrature, QuadratureResult};

/// Relative agreement required between quadrature and closed-form exponents.
pub const WKB_REL_TOL: f64 = 1e-8;
/// Relative agreement required between the two exact-transmission routes.
pub const EXACT_REL_TOL: f64 = 1e-12;
pub const MIN_CONVERGENCE_ORDER: f64 = 1.9;
/// Orders below this count as "not converging" for the negative control.
pub const STALLED_ORDER: f64 = 0.5;

/// Draws `(r, σ, K)` with `λK² < 1`.
pub fn sample_barrier<R: Rng>(rng: &mut R) -> (MarketParams, RangeBound) {
    let r = rng.gen_range(0.005..0.15);
    let sigma = rng.gen_range(0.05..2.0);
    let params = MarketParams::new(r, sigma).expect("sampled parameters are positive");
    let k = strike_bound(params.lambda()) * rng.gen_range(0.05..0.999);
    (
        params,
        RangeBound::from_width(k).expect("sampled width is positive"),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleAgreement {
    pub r: f64,
    pub sigma: f64,
    #[serde(rename = "K")]
    pub strike: f64,
    pub closed_form_exponent: f64,
    pub quadrature: QuadratureResult,
    pub exact: f64,
    pub inverse_amplitude_ratio: f64,
}

impl SampleAgreement {
    pub fn wkb_abs_diff(&self) -> f64 {
        (self.quadrature.value - self.closed_form_exponent).abs()
    }

    pub fn wkb_rel_diff(&self) -> f64 {
        self.wkb_abs_diff() / self.closed_form_exponent.abs()
    }

    pub fn exact_rel_diff(&self) -> f64 {
        (self.exact - self.inverse_amplitude_ratio).abs() / self.exact
    }
}

pub fn check_sample(
    params: &MarketParams,
    range: &RangeBound,
    tol: f64,
) -> Result<SampleAgreement> {
    let closed = wkb_exponent(params, range)?;
    let quad = wkb_exponent_quadrature(params, range, tol)?;
    let geom = barrier_geometry(params, range);
    let waves = wave_numbers(params, params.lambda(), geom.v0)?;
    Ok(SampleAgreement {
        r: params.r(),
        sigma: params.sigma(),
        strike: range.width(),
        closed_form_exponent: closed,
        quadrature: quad,
        exact: transmission_exact(params, range)?,
        inverse_amplitude_ratio: 1.0 / amplitude_ratio(waves.k, waves.q, geom.d),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub samples: usize,
    pub seed: u64,
    pub quad_tol: f64,
    pub max_wkb_abs_diff: f64,
    pub max_wkb_rel_diff: f64,
    pub max_exact_rel_diff: f64,
}

/// Random sweep comparing quadrature with the closed-form WKB exponent and
/// the exact transmission with the inverse amplitude ratio.
pub fn agreement_sweep(
    samples: usize,
    seed: u64,
    tol: f64,
    exec: Execution,
) -> Result<(AgreementReport, Vec<SampleAgreement>)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let draws: Vec<_> = (0..samples).map(|_| sample_barrier(&mut rng)).collect();
    let rows: Vec<SampleAgreement> = batch::map(&draws, exec, |(p, rb)| check_sample(p, rb, tol))
        .into_iter()
        .collect::<Result<_>>()?;
    let max = |f: fn(&SampleAgreement) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let report = AgreementReport {
        samples,
        seed,
        quad_tol: tol,
        max_wkb_abs_diff: max(SampleAgreement::wkb_abs_diff),
        max_wkb_rel_diff: max(SampleAgreement::wkb_rel_diff),
        max_exact_rel_diff: max(SampleAgreement::exact_rel_diff),
    };
    Ok((report, rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    pub quad_tol: f64,
    pub negative_control: bool,
    pub exec: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: 100,
            seed: 0x5eed,
            quad_tol: quadrature::DEFAULT_QUAD_TOL,
            negative_control: false,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub checks: Vec<CheckOutcome>,
    pub agreement: Option<AgreementReport>,
    pub residual: Option<ResidualReport>,
    pub negative_control: Option<ResidualReport>,
}

impl VerificationSummary {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Parameters of the PDE study: `(r, σ)`, starting price and box width.
pub const STUDY_PARAMS: (f64, f64) = (0.03, 0.47);
pub const STUDY_S0: f64 = 1.0;
pub const STUDY_WIDTH: f64 = 2.4;
pub const STUDY_TIMES: [f64; 3] = [0.0, 0.5, 1.0];

fn residual_study(time_factor_scale: f64) -> Result<ResidualReport> {
    let params = MarketParams::new(STUDY_PARAMS.0, STUDY_PARAMS.1)?;
    let lambda = params.lambda();
    convergence_study(
        &params,
        lambda,
        time_factor_scale * lambda.value(),
        STUDY_S0,
        STUDY_WIDTH,
        &pde::DEFAULT_LEVELS,
        &STUDY_TIMES,
    )
}

pub fn run_verification(opts: &VerifyOptions) -> VerificationSummary {
    let mut checks = Vec::new();
    let mut summary = VerificationSummary {
        checks: Vec::new(),
        agreement: None,
        residual: None,
        negative_control: None,
    };

    match agreement_sweep(opts.samples, opts.seed, opts.quad_tol, opts.exec) {
        Ok((rep, _)) => {
            let abs_bound = WKB_REL_TOL.max(10.0 * opts.quad_tol);
            checks.push(CheckOutcome {
                name: "quadrature_vs_closed_form".into(),
                passed: rep.max_wkb_rel_diff <= WKB_REL_TOL && rep.max_wkb_abs_diff <= abs_bound,
                detail: format!(
                    "{} samples: max rel diff {:.3e} (<= {:e}), max abs diff {:.3e} (<= {:e})",
                    rep.samples, rep.max_wkb_rel_diff, WKB_REL_TOL, rep.max_wkb_abs_diff, abs_bound
                ),
            });
            checks.push(CheckOutcome {
                name: "exact_vs_amplitude_ratio".into(),
                passed: rep.max_exact_rel_diff <= EXACT_REL_TOL,
                detail: format!(
                    "max rel diff {:.3e} (<= {:e})",
                    rep.max_exact_rel_diff, EXACT_REL_TOL
                ),
            });
            summary.agreement = Some(rep);
        }
        Err(e) => checks.push(CheckOutcome {
            name: "quadrature_vs_closed_form".into(),
            passed: false,
            detail: e.to_string(),
        }),
    }

    match residual_study(1.0) {
        Ok(rep) => {
            let order = rep.convergence_order.unwrap_or(f64::NAN);
            checks.push(CheckOutcome {
                name: "pde_residual_convergence".into(),
                passed: order >= MIN_CONVERGENCE_ORDER,
                detail: format!("observed order {order:.4} (>= {MIN_CONVERGENCE_ORDER})"),
            });
            summary.residual = Some(rep);
        }
        Err(e) => checks.push(CheckOutcome {
            name: "pde_residual_convergence".into(),
            passed: false,
            detail: e.to_string(),
        }),
    }

    if opts.negative_control {
        match residual_study(2.0) {
            Ok(rep) => {
                let order = rep.convergence_order.unwrap_or(f64::NAN);
                checks.push(CheckOutcome {
                    name: "pde_negative_control".into(),
                    passed: order < STALLED_ORDER,
                    detail: format!(
                        "time factor exp(2*lambda*t): observed order {order:.4}, expected non-convergence (< {STALLED_ORDER})"
                    ),
                });
                summary.negative_control = Some(rep);
            }
            Err(e) => checks.push(CheckOutcome {
                name: "pde_negative_control".into(),
                passed: false,
                detail: e.to_string(),
            }),
        }
    }

    summary.checks = checks;
    summary
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_range_bound() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..1000 {
            let (p, rb) = sample_barrier(&mut rng);
            let k = rb.width();
            assert!(p.lambda().value() * k * k < 1.0);
        }
    }

    #[test]
    fn sweep_is_deterministic_across_modes() {
        let (a, rows_a) = agreement_sweep(20, 3, 1e-10, Execution::Sequential).unwrap();
        let (b, rows_b) = agreement_sweep(20, 3, 1e-10, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(rows_a, rows_b);
    }

    #[test]
    fn default_verification_passes() {
        let summary = run_verification(&VerifyOptions {
            negative_control: true,
            ..VerifyOptions::default()
        });
        assert!(summary.all_passed(), "{:#?}", summary.checks);
        assert_eq!(summary.checks.len(), 4);
    }

    #[test]
    fn impossible_tolerance_fails() {
        let summary = run_verification(&VerifyOptions {
            quad_tol: 1e-15,
            ..VerifyOptions::default()
        });
        assert!(!summary.all_passed());
        assert!(summary.checks[0].detail.contains("tolerance not met"));
    }
}

//! Dormand–Prince 5(4) integration of the stationary price equation
//! `−½σ²S²φ″ − rSφ′ + rφ = λφ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Lambda, MarketParams};

pub const DEFAULT_ODE_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: DEFAULT_ODE_RTOL,
            atol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

impl OdeOptions {
    pub fn with_rtol(rtol: f64) -> Self {
        Self {
            rtol,
            atol: rtol * 1e-3,
            ..Self::default()
        }
    }
}

/// Initial data `φ(S₀) = phi0`, `φ′(S₀) = dphi0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub s0: f64,
    pub phi0: f64,
    pub dphi0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeSolution {
    pub s: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
}

type State = [f64; 2];

// Dormand–Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

struct Integrator<'a, F> {
    rhs: F,
    opts: &'a OdeOptions,
    steps: usize,
}

impl<F: Fn(f64, &State) -> State> Integrator<'_, F> {
    /// Advances `y` from `s` to `target`, carrying the step-size guess in `h`.
    fn advance(&mut self, s: &mut f64, y: &mut State, target: f64, h: &mut f64) -> Result<()> {
        let dir = (target - *s).signum();
        while (target - *s) * dir > 0.0 {
            if self.steps >= self.opts.max_steps {
                return Err(Error::StepFailure {
                    at: *s,
                    reason: "step budget exhausted",
                });
            }
            let remaining = (target - *s).abs();
            let mut step = h.abs().min(remaining);
            let last = step >= remaining;
            let hs = step * dir;

            let k1 = (self.rhs)(*s, y);
            let k2 = (self.rhs)(*s + C2 * hs, &axpy(*y, &[(A21, &k1)], hs));
            let k3 = (self.rhs)(*s + C3 * hs, &axpy(*y, &[(A31, &k1), (A32, &k2)], hs));
            let k4 = (self.rhs)(
                *s + C4 * hs,
                &axpy(*y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs),
            );
            let k5 = (self.rhs)(
                *s + C5 * hs,
                &axpy(*y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs),
            );
            let k6 = (self.rhs)(
                *s + hs,
                &axpy(
                    *y,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                    hs,
                ),
            );
            let y_new = axpy(
                *y,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
                hs,
            );
            let k7 = (self.rhs)(*s + hs, &y_new);
            let err_vec = axpy(
                [0.0, 0.0],
                &[
                    (E1, &k1),
                    (E3, &k3),
                    (E4, &k4),
                    (E5, &k5),
                    (E6, &k6),
                    (E7, &k7),
                ],
                hs,
            );

            let mut sum = 0.0;
            for i in 0..2 {
                let scale = self.opts.atol + self.opts.rtol * y[i].abs().max(y_new[i].abs());
                sum += (err_vec[i] / scale).powi(2);
            }
            let err = (sum / 2.0).sqrt();
            if !err.is_finite() {
                return Err(Error::StepFailure {
                    at: *s,
                    reason: "non-finite state",
                });
            }
            self.steps += 1;

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                *s = if last { target } else { *s + hs };
                *y = y_new;
                // keep the unclipped step size for the next interval
                if !last {
                    *h = step * factor;
                } else {
                    *h = h.abs().max(step * factor);
                }
            } else {
                step *= factor.min(1.0);
                *h = step;
                if step <= 1e-14 * s.abs().max(1.0) {
                    return Err(Error::StepFailure {
                        at: *s,
                        reason: "step size underflow",
                    });
                }
            }
        }
        Ok(())
    }
}

/// Integrates the stationary equation from `init` and samples `φ`, `φ′` on
/// `grid` (strictly increasing, positive prices; may straddle `S₀`).
pub fn solve_spatial_ode(
    params: &MarketParams,
    lambda: Lambda,
    init: InitialData,
    grid: &[f64],
    opts: &OdeOptions,
) -> Result<OdeSolution> {
    if !init.s0.is_finite() || init.s0 <= 0.0 {
        return Err(Error::Domain {
            name: "S0",
            value: init.s0,
            domain: "(0, inf)",
        });
    }
    if let Some(&bad) = grid.iter().find(|s| !s.is_finite() || **s <= 0.0) {
        return Err(Error::Domain {
            name: "grid",
            value: bad,
            domain: "(0, inf)",
        });
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::MismatchedGrid(
            "grid must be strictly increasing".into(),
        ));
    }
    if !(opts.rtol > 0.0 && opts.atol >= 0.0) {
        return Err(Error::invalid("rtol", opts.rtol, "must be > 0"));
    }

    let r = params.r();
    let half_var = 0.5 * params.sigma() * params.sigma();
    let l = lambda.value();
    // φ″ = ((r − λ)φ − rSφ′) / (½σ²S²)
    let rhs = |s: f64, y: &State| [y[1], ((r - l) * y[0] - r * s * y[1]) / (half_var * s * s)];

    let mut integ = Integrator {
        rhs,
        opts,
        steps: 0,
    };
    let n = grid.len();
    let mut phi = vec![0.0; n];
    let mut dphi = vec![0.0; n];
    let split = grid.partition_point(|&s| s < init.s0);
    let h0 = 1e-3 * init.s0;

    let mut s = init.s0;
    let mut y = [init.phi0, init.dphi0];
    let mut h = h0;
    for i in split..n {
        integ.advance(&mut s, &mut y, grid[i], &mut h)?;
        phi[i] = y[0];
        dphi[i] = y[1];
    }

    let mut s = init.s0;
    let mut y = [init.phi0, init.dphi0];
    let mut h = h0;
    for i in (0..split).rev() {
        integ.advance(&mut s, &mut y, grid[i], &mut h)?;
        phi[i] = y[0];
        dphi[i] = y[1];
    }

    Ok(OdeSolution {
        s: grid.to_vec(),
        phi,
        dphi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }

    #[test]
    fn constant_solution_when_lambda_equals_r() {
        let params = MarketParams::new(0.03, 0.47).unwrap();
        let l = Lambda::new(0.03).unwrap();
        let init = InitialData {
            s0: 1.0,
            phi0: 1.0,
            dphi0: 0.0,
        };
        let sol = solve_spatial_ode(
            &params,
            l,
            init,
            &grid(0.5, 4.0, 35),
            &OdeOptions::default(),
        )
        .unwrap();
        for v in &sol.phi {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn power_law_solution() {
        // φ = S^p solves the equation when ½σ²p(p−1) + rp − (r − λ) = 0.
        // With λ = 0 the homogeneous equation has p = 1 (call-like) as a root.
        let params = MarketParams::new(0.03, 0.47).unwrap();
        let l = Lambda::new(1e-300).unwrap();
        let init = InitialData {
            s0: 1.0,
            phi0: 1.0,
            dphi0: 1.0,
        };
        let g = grid(0.3, 5.0, 47);
        let sol = solve_spatial_ode(&params, l, init, &g, &OdeOptions::with_rtol(1e-11)).unwrap();
        for (s, v) in g.iter().zip(&sol.phi) {
            assert!((v - s).abs() < 1e-9 * s, "{s}: {v}");
        }
    }

    #[test]
    fn halving_tolerance_reproduces_solution() {
        let params = MarketParams::new(0.03, 0.47).unwrap();
        let init = InitialData {
            s0: 1.0,
            phi0: 1.0,
            dphi0: 0.0,
        };
        let g = [1.5, 2.0];
        let coarse = solve_spatial_ode(
            &params,
            params.lambda(),
            init,
            &g,
            &OdeOptions::with_rtol(1e-9),
        )
        .unwrap();
        let fine = solve_spatial_ode(
            &params,
            params.lambda(),
            init,
            &g,
            &OdeOptions::with_rtol(1e-12),
        )
        .unwrap();
        assert!(coarse.phi[1].is_finite());
        assert!((coarse.phi[1] - fine.phi[1]).abs() < 1e-6);
    }

    #[test]
    fn linearity() {
        let params = MarketParams::new(0.05, 0.3).unwrap();
        let l = params.lambda();
        let g = grid(0.8, 3.0, 22);
        let opts = OdeOptions::with_rtol(1e-11);
        let solve = |phi0, dphi0| {
            solve_spatial_ode(
                &params,
                l,
                InitialData {
                    s0: 1.0,
                    phi0,
                    dphi0,
                },
                &g,
                &opts,
            )
            .unwrap()
        };
        let a = solve(1.0, 0.0);
        let b = solve(0.0, 1.0);
        let scaled = solve(3.0, 0.0);
        let sum = solve(1.0, 1.0);
        for i in 0..g.len() {
            assert!((scaled.phi[i] - 3.0 * a.phi[i]).abs() < 1e-8 * scaled.phi[i].abs().max(1.0));
            assert!((sum.phi[i] - a.phi[i] - b.phi[i]).abs() < 1e-8 * sum.phi[i].abs().max(1.0));
        }
    }

    #[test]
    fn domain_errors() {
        let params = MarketParams::new(0.03, 0.47).unwrap();
        let l = params.lambda();
        let opts = OdeOptions::default();
        let bad_s0 = InitialData {
            s0: 0.0,
            phi0: 1.0,
            dphi0: 0.0,
        };
        assert!(matches!(
            solve_spatial_ode(&params, l, bad_s0, &[1.0], &opts),
            Err(Error::Domain { .. })
        ));
        let init = InitialData {
            s0: 1.0,
            phi0: 1.0,
            dphi0: 0.0,
        };
        assert!(solve_spatial_ode(&params, l, init, &[-1.0, 1.0], &opts).is_err());
        assert!(solve_spatial_ode(&params, l, init, &[2.0, 1.0], &opts).is_err());
    }

    #[test]
    fn step_budget() {
        let params = MarketParams::new(0.03, 0.47).unwrap();
        let init = InitialData {
            s0: 1.0,
            phi0: 1.0,
            dphi0: 0.0,
        };
        let opts = OdeOptions {
            max_steps: 3,
            ..OdeOptions::default()
        };
        let err = solve_spatial_ode(&params, params.lambda(), init, &[50.0], &opts).unwrap_err();
        assert!(matches!(err, Error::StepFailure { .. }));
    }
}

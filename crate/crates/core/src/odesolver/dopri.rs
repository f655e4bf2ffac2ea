//! Dormand–Prince 5(4) with a singularity guard.
//!
//! The state is a short array of complex numbers. A step whose stages enter
//! the guarded region is bisected; once the step is below the floor the
//! integration stops and reports where the guard was met.

use num_complex::Complex64;

use crate::error::SolverError;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Fifth-order weights (the last row of `A`, FSAL).
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

/// Fifth-order minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest step size before giving up (guard: blow-up; error: underflow).
    pub h_floor: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Outcome<const N: usize> {
    Reached([Complex64; N]),
    /// The guard could not be avoided; last accepted point.
    Guarded {
        u: f64,
        y: [Complex64; N],
    },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Run<const N: usize> {
    pub outcome: Outcome<N>,
    /// Suggested step size for a continuation.
    pub h_next: f64,
}

/// Running totals shared across consecutive integrations.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Counters {
    pub accepted: usize,
    pub rejected: usize,
    pub error_sum: f64,
}

fn axpy<const N: usize>(y: &[Complex64; N], h: f64, coeffs: &[f64], k: &[[Complex64; N]; 7]) -> [Complex64; N] {
    let mut out = *y;
    for (j, &a) in coeffs.iter().enumerate() {
        if a != 0.0 {
            for i in 0..N {
                out[i] += k[j][i] * (h * a);
            }
        }
    }
    out
}

fn finite<const N: usize>(y: &[Complex64; N]) -> bool {
    y.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Integrates `dy/du = rhs(u, y)` from `u0` to `u1` (either direction).
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate<const N: usize>(
    rhs: &impl Fn(f64, &[Complex64; N]) -> [Complex64; N],
    guarded: &impl Fn(f64, &[Complex64; N]) -> bool,
    u0: f64,
    u1: f64,
    y0: [Complex64; N],
    h_init: f64,
    tol: Tolerances,
    max_steps: usize,
    counters: &mut Counters,
) -> Result<Run<N>, SolverError> {
    let dir = if u1 >= u0 { 1.0 } else { -1.0 };
    let span = (u1 - u0).abs();
    let mut u = u0;
    let mut y = y0;
    let mut h = if h_init > 0.0 { h_init.min(span) } else { span };
    let mut no_grow = false;
    let mut k = [[Complex64::new(0.0, 0.0); N]; 7];

    loop {
        let remaining = (u1 - u).abs();
        if remaining <= 0.0 {
            return Ok(Run {
                outcome: Outcome::Reached(y),
                h_next: h,
            });
        }
        if counters.accepted + counters.rejected >= max_steps {
            return Err(SolverError::TooManySteps(max_steps));
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let hs = dir * step;

        let mut touched = false;
        for s in 0..7 {
            let ys = if s == 0 { y } else { axpy(&y, hs, &A[s][..s], &k) };
            let us = u + C[s] * hs;
            if !finite(&ys) || guarded(us, &ys) {
                touched = true;
                break;
            }
            k[s] = rhs(us, &ys);
        }
        let y_new = if touched { y } else { axpy(&y, hs, &B, &k) };
        if !touched && (!finite(&y_new) || guarded(u + hs, &y_new)) {
            touched = true;
        }
        if touched {
            counters.rejected += 1;
            if step <= tol.h_floor {
                return Ok(Run {
                    outcome: Outcome::Guarded { u, y },
                    h_next: h,
                });
            }
            h = step / 2.0;
            no_grow = true;
            continue;
        }

        let mut err = 0.0f64;
        let mut abs_err = 0.0f64;
        for i in 0..N {
            let mut e = Complex64::new(0.0, 0.0);
            for (j, &ej) in E.iter().enumerate() {
                if ej != 0.0 {
                    e += k[j][i] * ej;
                }
            }
            let e = (e * hs).norm();
            let scale = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
            err = err.max(e / scale);
            abs_err = abs_err.max(e);
        }
        if !err.is_finite() {
            counters.rejected += 1;
            if step <= tol.h_floor {
                return Err(SolverError::NonFinite(u));
            }
            h = step / 2.0;
            continue;
        }
        if err <= 1.0 {
            u = if last { u1 } else { u + hs };
            y = y_new;
            counters.accepted += 1;
            counters.error_sum += abs_err;
            let mut factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if no_grow {
                factor = factor.min(1.0);
            }
            // keep the controller's step when the last step was truncated
            h = if last { h.max(step * factor) } else { step * factor };
        } else {
            counters.rejected += 1;
            h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h < tol.h_floor {
                return Err(SolverError::StepUnderflow { time: u, step: h });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerances = Tolerances {
        rtol: 1e-10,
        atol: 1e-12,
        h_floor: 1e-14,
    };

    #[test]
    fn exponential_growth() {
        let rhs = |_u: f64, y: &[Complex64; 1]| [y[0] * Complex64::new(0.0, 1.0)];
        let mut counters = Counters::default();
        let run = integrate(
            &rhs,
            &|_, _| false,
            0.0,
            3.0,
            [Complex64::new(1.0, 0.0)],
            0.0,
            TOL,
            100_000,
            &mut counters,
        )
        .unwrap();
        let Outcome::Reached(y) = run.outcome else {
            panic!("guarded")
        };
        assert!((y[0] - Complex64::from_polar(1.0, 3.0)).norm() < 1e-9);
        // backwards
        let run = integrate(&rhs, &|_, _| false, 3.0, 0.0, y, 0.0, TOL, 100_000, &mut counters).unwrap();
        let Outcome::Reached(y) = run.outcome else {
            panic!("guarded")
        };
        assert!((y[0] - Complex64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn guard_stops_before_singularity() {
        // y' = −1/(2y), y(0) = 1: y = √(1 − u), singular at u = 1
        let rhs = |_u: f64, y: &[Complex64; 1]| [-0.5 / y[0]];
        let guard = |_u: f64, y: &[Complex64; 1]| y[0].re < 1e-5;
        let mut counters = Counters::default();
        let run = integrate(
            &rhs,
            &guard,
            0.0,
            2.0,
            [Complex64::new(1.0, 0.0)],
            0.0,
            TOL,
            100_000,
            &mut counters,
        )
        .unwrap();
        match run.outcome {
            Outcome::Guarded { u, .. } => assert!((u - 1.0).abs() < 1e-7, "u = {u}"),
            Outcome::Reached(_) => panic!("should have met the guard"),
        }
    }

    #[test]
    fn step_budget_is_enforced() {
        let rhs = |_u: f64, y: &[Complex64; 1]| [y[0] * 50.0];
        let mut counters = Counters::default();
        let err = integrate(
            &rhs,
            &|_, _| false,
            0.0,
            1.0,
            [Complex64::new(1.0, 0.0)],
            0.0,
            TOL,
            10,
            &mut counters,
        );
        assert!(matches!(err, Err(SolverError::TooManySteps(10))));
    }
}

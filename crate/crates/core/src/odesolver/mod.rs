//! Reference solutions of the Loewner equations by numerical integration.
//!
//! Downward: `∂_t g_t(z) = 2 / (g_t(z) − λ(t))`, `g_0(z) = z`.
//! Upward:   `∂_t h_t(z) = −2 / (h_t(z) − ξ(t))`, `h_0(z) = z`.
//! With `ξ(t) = λ(T − t)` the upward solution at time `T` is `g_T^{-1}`.
//!
//! The sampled driver is integrated cell by cell. Inside a cell the
//! substitution `τ = t_j + u²` turns the square-root interpolant into a linear
//! function of `u`, so the right-hand side is smooth and the adaptive
//! integrator does not have to resolve the `√` kink at grid times. This module
//! shares no evaluation code with the slit-map composition.

mod dopri;
mod raster;

pub use raster::{hull_raster, HullRaster, RasterBounds};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::driver::{Interpolation, SampledDriver};
use crate::error::{Error, Result, SolverError};
use dopri::{integrate, Counters, Outcome, Tolerances};

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative per-step tolerance.
    pub tol: f64,
    /// Absolute per-step tolerance.
    pub abs_tol: f64,
    /// Blow-up threshold on `|g − λ|`; the integrator refuses to step within
    /// `10 · eps_blow` of the driver and reports the blow-up there.
    pub eps_blow: f64,
    pub max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            abs_tol: 1e-12,
            eps_blow: 1e-6,
            max_steps: 2_000_000,
        }
    }
}

impl SolverOptions {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rtol: self.tol,
            atol: self.abs_tol,
            h_floor: 1e-14,
        }
    }

    fn guard(&self) -> f64 {
        10.0 * self.eps_blow
    }
}

/// Result of one integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeResult {
    /// `g_t(z)` or `h_t(z)`; at blow-up, the last value before the guard.
    pub value: Complex64,
    pub blown_up: bool,
    /// `T_z` when `blown_up`.
    pub blowup_time: Option<f64>,
    pub steps_taken: usize,
    /// Sum of accepted local error estimates.
    pub error_estimate: f64,
}

/// The driving term of an upward solve.
#[derive(Debug, Clone, Copy)]
pub enum Forcing<'a> {
    /// `ξ(s) = λⁿ(s)`.
    Direct(&'a SampledDriver),
    /// `ξ(s) = λⁿ(horizon − s)`.
    Reversed { driver: &'a SampledDriver, horizon: f64 },
}

impl Forcing<'_> {
    pub fn driver(&self) -> &SampledDriver {
        match self {
            Forcing::Direct(d) => d,
            Forcing::Reversed { driver, .. } => driver,
        }
    }

    /// `ξ(s)`.
    pub fn value_at(&self, s: f64) -> f64 {
        match self {
            Forcing::Direct(d) => d.value_at(s),
            Forcing::Reversed { driver, horizon } => driver.value_at(horizon - s),
        }
    }
}

/// Which equation, expressed in driver time `τ`: `dy/dτ = sign · 2/(y − λ(τ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Flow {
    /// Downward equation, or upward equation with reversed driver.
    Plus,
    /// Upward equation with direct driver.
    Minus,
}

enum FlowEnd<const N: usize> {
    Reached([Complex64; N]),
    Guarded { tau: f64, y: [Complex64; N] },
}

struct FlowRun<const N: usize> {
    end: FlowEnd<N>,
    counters: Counters,
}

/// Integrates across the driver cells between driver times `tau_from` and
/// `tau_to`. State is `[y]` or `[y, y']` with `y' = ∂y/∂z`.
fn flow<const N: usize>(
    d: &SampledDriver,
    kind: Flow,
    tau_from: f64,
    tau_to: f64,
    y0: [Complex64; N],
    guard_im: bool,
    opts: &SolverOptions,
) -> Result<FlowRun<N>, SolverError> {
    let n = d.n();
    let nf = n as f64;
    let root_n = nf.sqrt();
    let sign = match kind {
        Flow::Plus => 1.0,
        Flow::Minus => -1.0,
    };
    let guard_dist = opts.guard();
    let tol = opts.tolerances();
    let mut counters = Counters::default();
    let mut y = y0;
    let mut h = 0.0;
    let up = tau_to >= tau_from;
    let mut tau = tau_from;
    let mut j = if up {
        ((tau_from * nf).floor().max(0.0) as usize).min(n - 1)
    } else {
        ((tau_from * nf).ceil() as usize).clamp(1, n) - 1
    };

    while (up && tau < tau_to) || (!up && tau > tau_to) {
        let t_j = j as f64 / nf;
        let t_next = (j + 1) as f64 / nf;
        let seg_end = if up { t_next.min(tau_to) } else { t_j.max(tau_to) };
        let base = d.values()[j];
        let slope = match d.mode() {
            Interpolation::SqrtInterp => d.increment(j) * root_n,
            Interpolation::VerticalStep => 0.0,
        };
        let u_a = (tau - t_j).max(0.0).sqrt();
        let u_b = (seg_end - t_j).max(0.0).sqrt();

        let rhs = |u: f64, s: &[Complex64; N]| {
            let gap = s[0] - (base + slope * u);
            let inv = (4.0 * sign * u) / gap;
            let mut out = [Complex64::new(0.0, 0.0); N];
            out[0] = inv;
            if N > 1 {
                out[1] = -inv / gap * s[1];
            }
            out
        };
        let guarded = |u: f64, s: &[Complex64; N]| {
            let gap = s[0] - (base + slope * u);
            gap.norm() < guard_dist || (guard_im && s[0].im <= 0.0)
        };
        let run = integrate(&rhs, &guarded, u_a, u_b, y, h, tol, opts.max_steps, &mut counters)?;
        h = run.h_next;
        match run.outcome {
            Outcome::Reached(v) => y = v,
            Outcome::Guarded { u, y } => {
                return Ok(FlowRun {
                    end: FlowEnd::Guarded { tau: t_j + u * u, y },
                    counters,
                })
            }
        }
        tau = seg_end;
        if up {
            j = (j + 1).min(n - 1);
        } else {
            j = j.saturating_sub(1);
        }
    }
    Ok(FlowRun {
        end: FlowEnd::Reached(y),
        counters,
    })
}

fn check_time(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("time {t} outside [0, 1]")));
    }
    Ok(())
}

/// `g_t(z0)` for the downward equation driven by `λⁿ`, with blow-up
/// detection.
pub fn solve_downward(d: &SampledDriver, z0: Complex64, t: f64, opts: &SolverOptions) -> Result<OdeResult> {
    check_time(t)?;
    if !(z0.im > 0.0) {
        return Err(Error::LowerHalfPlane(z0));
    }
    let run = flow::<1>(d, Flow::Plus, 0.0, t, [z0], true, opts)?;
    Ok(match run.end {
        FlowEnd::Reached([v]) => OdeResult {
            value: v,
            blown_up: false,
            blowup_time: None,
            steps_taken: run.counters.accepted,
            error_estimate: run.counters.error_sum,
        },
        FlowEnd::Guarded { tau, y: [v] } => OdeResult {
            value: v,
            blown_up: true,
            blowup_time: Some(tau),
            steps_taken: run.counters.accepted,
            error_estimate: run.counters.error_sum,
        },
    })
}

fn upward<const N: usize>(xi: Forcing<'_>, y0: [Complex64; N], big_t: f64, opts: &SolverOptions) -> Result<FlowRun<N>> {
    if !(y0[0].im >= 0.0) {
        return Err(Error::LowerHalfPlane(y0[0]));
    }
    let (d, kind, from, to) = match xi {
        Forcing::Direct(d) => {
            check_time(big_t)?;
            (d, Flow::Minus, 0.0, big_t)
        }
        Forcing::Reversed { driver, horizon } => {
            check_time(horizon)?;
            if !(0.0..=horizon).contains(&big_t) {
                return Err(Error::InvalidArgument(format!(
                    "upward time {big_t} exceeds the reversal horizon {horizon}"
                )));
            }
            (driver, Flow::Plus, horizon, horizon - big_t)
        }
    };
    let run = flow::<N>(d, kind, from, to, y0, false, opts)?;
    if let FlowEnd::Guarded { tau, .. } = run.end {
        return Err(SolverError::Singular(tau).into());
    }
    Ok(run)
}

/// `h_T(z)` for the upward equation driven by `ξ`.
pub fn solve_upward(xi: Forcing<'_>, z: Complex64, big_t: f64, opts: &SolverOptions) -> Result<OdeResult> {
    let run = upward::<1>(xi, [z], big_t, opts)?;
    let FlowEnd::Reached([v]) = run.end else { unreachable!() };
    Ok(OdeResult {
        value: v,
        blown_up: false,
        blowup_time: None,
        steps_taken: run.counters.accepted,
        error_estimate: run.counters.error_sum,
    })
}

/// `(h_T(z), h_T'(z))`, integrating `∂_t h' = 2h'/(h − ξ)²` alongside.
pub fn upward_with_derivative(
    xi: Forcing<'_>,
    z: Complex64,
    big_t: f64,
    opts: &SolverOptions,
) -> Result<(Complex64, Complex64)> {
    let run = upward::<2>(xi, [z, Complex64::new(1.0, 0.0)], big_t, opts)?;
    let FlowEnd::Reached([v, dv]) = run.end else {
        unreachable!()
    };
    Ok((v, dv))
}

/// `g_T^{-1}(z)`: the upward solve with the driver reversed on `[0, T]`.
pub fn inverse_map(d: &SampledDriver, z: Complex64, big_t: f64, opts: &SolverOptions) -> Result<OdeResult> {
    solve_upward(
        Forcing::Reversed {
            driver: d,
            horizon: big_t,
        },
        z,
        big_t,
        opts,
    )
}

/// `f̂_t(z) = g_t^{-1}(z + λⁿ(t))`.
pub fn fhat(d: &SampledDriver, t: f64, z: Complex64, opts: &SolverOptions) -> Result<Complex64> {
    check_time(t)?;
    Ok(inverse_map(d, z + d.value_at(t), t, opts)?.value)
}

/// `(w, z′)` with `w = g_T^{-1}(z)` from the upward solve and `z′ = g_T(w)`
/// from the downward solve.
pub fn inverse_check(
    d: &SampledDriver,
    z: Complex64,
    big_t: f64,
    opts: &SolverOptions,
) -> Result<(Complex64, Complex64)> {
    let w = inverse_map(d, z, big_t, opts)?.value;
    let back = solve_downward(d, w, big_t, opts)?;
    if back.blown_up {
        return Err(Error::InvalidArgument(format!("{z} lies on the hull at time {big_t}")));
    }
    Ok((w, back.value))
}

/// `|f̂'_t(iy)|`.
pub fn fhat_prime(d: &SampledDriver, t: f64, y: f64, opts: &SolverOptions) -> Result<f64> {
    check_time(t)?;
    if !(y > 0.0) {
        return Err(Error::InvalidArgument(format!("y must be positive, got {y}")));
    }
    let z = Complex64::new(d.value_at(t), y);
    let (_, dv) = upward_with_derivative(Forcing::Reversed { driver: d, horizon: t }, z, t, opts)?;
    Ok(dv.norm())
}

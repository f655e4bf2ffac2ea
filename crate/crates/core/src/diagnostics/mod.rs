//! Checks of the geometric estimates, the self-intersection sweep, and the
//! coupled convergence study.

pub mod checks;
pub mod convergence;
pub mod geometry;

pub use checks::{CheckReport, Violation};
pub use convergence::{convergence_study, estimate_beta, rate_exponent, ConvergenceConfig, ConvergenceReport};

use crate::error::{Error, Result};
use crate::zipper::Curve;

/// `max_{t ∈ grid} |A(t) − B(t)|`. Both curves must already be sampled at
/// exactly the grid times.
pub fn supnorm_distance(a: &Curve, b: &Curve, grid: &[f64]) -> Result<f64> {
    if a.times != grid || b.times != grid {
        return Err(Error::GridMismatch);
    }
    Ok(a.points
        .iter()
        .zip(&b.points)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max))
}

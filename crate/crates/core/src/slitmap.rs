//! Elementary slit maps of the upper half plane.
//!
//! The tilted map `G(z) = (z + a)^{1−α} (z − b)^α` sends `H` onto `H` minus a
//! straight slit from 0 at angle `απ`, with `α a = (1 − α) b`. The vertical
//! map `z ↦ x₀ + √((z − x₀)² − 4 dt)` removes the segment `(x₀, x₀ + 2i√dt]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of one tilted-slit step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitParams {
    /// Slit angle as a fraction of π.
    pub alpha: f64,
    /// Left pre-image offset: `−a` maps to the base of the slit.
    pub a: f64,
    /// Right pre-image offset: `b` maps to the base of the slit.
    pub b: f64,
    /// Capacity time consumed by the step.
    pub dt: f64,
    /// Driver increment over the step.
    pub dlambda: f64,
}

/// Slit angle for the driver `c √t`: `α = 1/2 − c / (2√(16 + c²))`.
///
/// Evaluated as `8 / (r (r + |c|))` on the small side to avoid cancellation.
pub fn slit_angle(c: f64) -> f64 {
    let r = (16.0 + c * c).sqrt();
    let small = 8.0 / (r * (r + c.abs()));
    if c >= 0.0 {
        small
    } else {
        1.0 - small
    }
}

impl SlitParams {
    /// The step map for the square-root driver rising by `dlambda` over
    /// capacity time `dt`.
    pub fn from_step(dlambda: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        if !dlambda.is_finite() {
            return Err(Error::InvalidArgument(format!("dlambda must be finite, got {dlambda}")));
        }
        Ok(Self::from_step_unchecked(dlambda, dt))
    }

    pub(crate) fn from_step_unchecked(dlambda: f64, dt: f64) -> Self {
        let alpha = slit_angle(dlambda / dt.sqrt());
        let ratio = ((1.0 - alpha) / alpha).sqrt();
        let root = dt.sqrt();
        Self {
            alpha,
            a: 2.0 * root * ratio,
            b: 2.0 * root / ratio,
            dt,
            dlambda,
        }
    }

    /// The same slit run for capacity time `s` instead of `dt`: same angle,
    /// offsets and increment scaled by `√(s/dt)`.
    pub fn scaled(&self, s: f64) -> Self {
        let f = (s / self.dt).sqrt();
        Self {
            alpha: self.alpha,
            a: self.a * f,
            b: self.b * f,
            dt: s,
            dlambda: self.dlambda * f,
        }
    }

    /// `G(z)`; rejects points strictly below the real axis.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.im < 0.0 {
            return Err(Error::LowerHalfPlane(z));
        }
        Ok(self.apply(z))
    }

    /// `G(z)` for `Im z ≥ 0` without the range check. The result always has
    /// `Im ≥ 0`.
    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        let left = z + self.a;
        let right = z - self.b;
        if left == Complex64::new(0.0, 0.0) || right == Complex64::new(0.0, 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        let beta = 1.0 - self.alpha;
        let log_mod = beta * left.norm().ln() + self.alpha * right.norm().ln();
        let theta = (beta * upper_arg(left) + self.alpha * upper_arg(right)).clamp(0.0, PI);
        Complex64::from_polar(log_mod.exp(), theta)
    }

    /// `G'(z) = G(z) ((1 − α)/(z + a) + α/(z − b))`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.apply(z) * ((1.0 - self.alpha) / (z + self.a) + self.alpha / (z - self.b))
    }

    /// Image of 0: `a^{1−α} b^α e^{iαπ}`.
    pub fn tip(&self) -> Complex64 {
        let modulus = ((1.0 - self.alpha) * self.a.ln() + self.alpha * self.b.ln()).exp();
        Complex64::from_polar(modulus, self.alpha * PI)
    }
}

/// Argument in `[0, π]` for a point of the closed upper half plane; a
/// negative zero imaginary part is read as `+0`.
#[inline]
fn upper_arg(w: Complex64) -> f64 {
    let im = if w.im > 0.0 { w.im } else { 0.0 };
    im.atan2(w.re)
}

/// `√w₁ √w₂` with both arguments in `[0, π]`.
#[inline]
fn upper_sqrt_product(w1: Complex64, w2: Complex64) -> Complex64 {
    let modulus = (w1.norm() * w2.norm()).sqrt();
    let theta = (0.5 * (upper_arg(w1) + upper_arg(w2))).clamp(0.0, PI);
    Complex64::from_polar(modulus, theta)
}

/// `shift + √((z − shift)² − 4 dt)` on the branch asymptotic to `z`.
pub fn eval_vertical(dt: f64, z: Complex64, shift: f64) -> Result<Complex64> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if z.im < 0.0 {
        return Err(Error::LowerHalfPlane(z));
    }
    Ok(apply_vertical(dt.sqrt(), z, shift))
}

/// Vertical slit map taking `root_dt = √dt`.
#[inline]
pub(crate) fn apply_vertical(root_dt: f64, z: Complex64, shift: f64) -> Complex64 {
    let w = z - shift;
    let h = 2.0 * root_dt;
    Complex64::new(shift, 0.0) + upper_sqrt_product(w - h, w + h)
}

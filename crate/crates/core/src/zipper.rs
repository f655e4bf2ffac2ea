//! Curve evaluation by composition of per-step slit maps.
//!
//! With `G_k` the slit map of step `k`, the normalized inverse map at grid
//! time `t_k` is `f̂_{t_k} = G_0 ∘ G_1 ∘ ⋯ ∘ G_{k−1}` (shifted by the base
//! point `λ(0)`), and inside step `k` the curve is the image under `f̂_{t_k}`
//! of the partial slit tip.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::driver::{locate, Interpolation, SampledDriver};
use crate::error::{Error, Result};
use crate::slitmap::{apply_vertical, SlitParams};

#[derive(Debug, Clone, PartialEq)]
enum Steps {
    Tilted(Vec<SlitParams>),
    /// Slit base `λ(t_k)` of each step.
    Vertical(Vec<f64>),
}

/// The ordered per-step maps of one driver.
#[derive(Debug, Clone, PartialEq)]
pub struct ZipperChain {
    dt: f64,
    steps: Steps,
    driver: SampledDriver,
}

/// A curve sampled under capacity parametrization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub times: Vec<f64>,
    pub points: Vec<Complex64>,
    /// True when only the sample points belong to the trace and the segments
    /// between them are straight-line joins (vertical-slit mode).
    pub polyline: bool,
}

impl Curve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl ZipperChain {
    /// One map per grid step. Square-root drivers give tilted slits,
    /// step drivers give vertical slits.
    pub fn build(driver: &SampledDriver) -> Self {
        let dt = driver.dt();
        let steps = match driver.mode() {
            Interpolation::SqrtInterp => Steps::Tilted(
                (0..driver.n())
                    .map(|k| SlitParams::from_step_unchecked(driver.increment(k), dt))
                    .collect(),
            ),
            Interpolation::VerticalStep => Steps::Vertical(driver.values()[..driver.n()].to_vec()),
        };
        Self {
            dt,
            steps,
            driver: driver.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.driver.n()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn driver(&self) -> &SampledDriver {
        &self.driver
    }

    pub fn mode(&self) -> Interpolation {
        self.driver.mode()
    }

    /// Tilted-slit parameters, or `None` in vertical mode.
    pub fn slit_params(&self) -> Option<&[SlitParams]> {
        match &self.steps {
            Steps::Tilted(p) => Some(p),
            Steps::Vertical(_) => None,
        }
    }

    /// `f̂_{t_k}(z) = f_{t_k}(z + λ(t_k))`, the map from `H` onto the
    /// complement of the curve up to `t_k`, normalized so that 0 goes to the
    /// tip.
    pub fn fhat(&self, k: usize, z: Complex64) -> Result<Complex64> {
        if k > self.n() {
            return Err(Error::InvalidArgument(format!(
                "step index {k} exceeds n = {}",
                self.n()
            )));
        }
        if z.im < 0.0 {
            return Err(Error::LowerHalfPlane(z));
        }
        Ok(self.fhat_unchecked(k, z))
    }

    fn fhat_unchecked(&self, k: usize, z: Complex64) -> Complex64 {
        let values = self.driver.values();
        match &self.steps {
            Steps::Tilted(params) => {
                let w = params[..k].iter().rev().fold(z, |w, p| p.apply(w));
                w + values[0]
            }
            Steps::Vertical(shifts) => {
                let root = self.dt.sqrt();
                shifts[..k]
                    .iter()
                    .rev()
                    .fold(z + values[k], |w, &x| apply_vertical(root, w, x))
            }
        }
    }

    /// `f̂'_{t_k}(z)` by the chain rule (tilted mode only).
    pub fn fhat_derivative(&self, k: usize, z: Complex64) -> Result<Complex64> {
        let params = self
            .slit_params()
            .ok_or_else(|| Error::InvalidArgument("derivative needs tilted slits".into()))?;
        if k > params.len() {
            return Err(Error::InvalidArgument(format!("step index {k} exceeds n")));
        }
        if z.im < 0.0 {
            return Err(Error::LowerHalfPlane(z));
        }
        let mut w = z;
        let mut deriv = Complex64::new(1.0, 0.0);
        for p in params[..k].iter().rev() {
            deriv *= p.derivative(w);
            w = p.apply(w);
        }
        Ok(deriv)
    }

    /// `γⁿ(t)` for `t ∈ [0, 1]` (tilted mode).
    pub fn curve_point(&self, t: f64) -> Result<Complex64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("time {t} outside [0, 1]")));
        }
        let params = self
            .slit_params()
            .ok_or_else(|| Error::InvalidArgument("vertical slits only define the curve at grid times".into()))?;
        let (k, s) = locate(self.n(), t);
        let inner = if s > 0.0 {
            params[k].scaled(s).tip()
        } else {
            Complex64::new(0.0, 0.0)
        };
        Ok(self.fhat_unchecked(k, inner))
    }

    /// Tilted mode: `γⁿ` at `j/(n m)` via the exact cell/offset split.
    fn tilted_sample(&self, params: &[SlitParams], j: usize, m: usize) -> Complex64 {
        let n = self.n();
        let (k, r) = if j == n * m { (n - 1, m) } else { (j / m, j % m) };
        let inner = if r == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            params[k].scaled(self.dt * r as f64 / m as f64).tip()
        };
        self.fhat_unchecked(k, inner)
    }

    /// Vertical mode: tip at `t_k`, i.e. the image of the tip of step `k − 1`.
    fn vertical_tip(&self, k: usize) -> Complex64 {
        if k == 0 {
            return Complex64::new(self.driver.values()[0], 0.0);
        }
        self.fhat_unchecked(k - 1, Complex64::new(0.0, 2.0 * self.dt.sqrt()))
    }

    /// Samples the whole curve: `n m + 1` points in tilted mode, the `n + 1`
    /// grid tips in vertical mode. Points are evaluated in parallel.
    pub fn simulate(&self, m: usize) -> Result<Curve> {
        if m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        let n = self.n();
        Ok(match &self.steps {
            Steps::Tilted(params) => {
                let total = n * m;
                let points = (0..=total)
                    .into_par_iter()
                    .map(|j| self.tilted_sample(params, j, m))
                    .collect();
                let times = (0..=total).map(|j| j as f64 / total as f64).collect();
                Curve {
                    times,
                    points,
                    polyline: false,
                }
            }
            Steps::Vertical(_) => {
                let points = (0..=n).into_par_iter().map(|k| self.vertical_tip(k)).collect();
                let times = (0..=n).map(|k| self.driver.time(k)).collect();
                Curve {
                    times,
                    points,
                    polyline: true,
                }
            }
        })
    }

    /// Evaluates the curve at the given times. Vertical mode accepts only
    /// grid times.
    pub fn sample_at(&self, times: &[f64]) -> Result<Curve> {
        let points = match &self.steps {
            Steps::Tilted(_) => times
                .par_iter()
                .map(|&t| self.curve_point(t))
                .collect::<Result<Vec<_>>>()?,
            Steps::Vertical(_) => {
                let n = self.n() as f64;
                times
                    .par_iter()
                    .map(|&t| {
                        let k = (t * n).round();
                        if (k / n - t).abs() > 1e-12 || !(0.0..=n).contains(&k) {
                            return Err(Error::InvalidArgument(format!(
                                "time {t} is not a grid time of the vertical-slit curve"
                            )));
                        }
                        Ok(self.vertical_tip(k as usize))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Curve {
            times: times.to_vec(),
            points,
            polyline: matches!(self.steps, Steps::Vertical(_)),
        })
    }
}

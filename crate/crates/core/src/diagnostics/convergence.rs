//! Coupled convergence study: simulate one driver at doubling resolutions
//! and measure successive sup-norm distances on the coarsest grid.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::supnorm_distance;
use crate::driver::{
    derive_seed, refine_bridge, sample_bm, sqrt_driver, zero_driver, Interpolation, SampledDriver, RNG_NAME,
};
use crate::error::{Error, Result};
use crate::odesolver::{fhat_prime, SolverOptions};
use crate::zipper::ZipperChain;

/// Drivers the study knows how to resample at any resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DriverFamily {
    Brownian { kappa: f64 },
    Sqrt { c: f64 },
    Zero,
}

impl DriverFamily {
    /// Coarsest driver; Brownian paths are then refined by bridge sampling.
    fn coarse(&self, n: usize, seed: u64) -> Result<SampledDriver> {
        match *self {
            DriverFamily::Brownian { kappa } => sample_bm(kappa, n, seed),
            DriverFamily::Sqrt { c } => sqrt_driver(c, n),
            DriverFamily::Zero => zero_driver(n),
        }
    }

    fn refine(&self, d: &SampledDriver, seed: u64, level: usize) -> Result<SampledDriver> {
        match *self {
            DriverFamily::Brownian { .. } => refine_bridge(d, derive_seed(seed, level as u64)),
            DriverFamily::Sqrt { c } => sqrt_driver(c, 2 * d.n()),
            DriverFamily::Zero => zero_driver(2 * d.n()),
        }
    }
}

/// Grids for the derivative-growth fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaGrid {
    pub times: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Default for BetaGrid {
    fn default() -> Self {
        Self {
            times: vec![0.25, 0.5, 0.75, 1.0],
            ys: (0..8).map(|i| 10f64.powf(-3.0 + 2.0 * i as f64 / 7.0)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    pub family: DriverFamily,
    pub seeds: Vec<u64>,
    pub n0: usize,
    pub doublings: usize,
    /// Samples per step on the coarsest level.
    pub m: usize,
    pub mode: Interpolation,
    /// Known β; estimated from each seed's coarsest driver when absent.
    pub beta: Option<f64>,
    pub beta_grid: BetaGrid,
    pub solver: SolverOptions,
}

impl ConvergenceConfig {
    pub fn new(family: DriverFamily, seeds: Vec<u64>, n0: usize, doublings: usize) -> Self {
        Self {
            family,
            seeds,
            n0,
            doublings,
            m: 2,
            mode: Interpolation::SqrtInterp,
            beta: None,
            beta_grid: BetaGrid::default(),
            solver: SolverOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n0 < 16 {
            return Err(Error::InvalidArgument(format!(
                "n0 must be at least 16, got {}",
                self.n0
            )));
        }
        if self.doublings < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 doublings, got {}",
                self.doublings
            )));
        }
        if self.m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidArgument("no seeds given".into()));
        }
        if let Some(b) = self.beta {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::InvalidArgument(format!("beta must lie in [0, 1), got {b}")));
            }
        }
        Ok(())
    }
}

/// Least-squares fit of `log max_t |f̂'_t(iy)| ≈ log c0 − β log y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    pub beta: f64,
    /// Smallest constant with `|f̂'_t(iy)| ≤ c0 y^{−β}` on the sampled grid.
    pub c0: f64,
    /// Largest `y` of the grid.
    pub y0: f64,
    pub residual: f64,
}

/// Rate exponent `(1 − √((1+β)/2)) / 2` predicted for a given β.
pub fn rate_exponent(beta: f64) -> f64 {
    0.5 * (1.0 - ((1.0 + beta) / 2.0).sqrt())
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b, rms residual)`.
fn ols(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    Some((icpt, slope, (rss / n).sqrt()))
}

/// Fits the derivative-growth exponent of `d` on the given grids, using the
/// ODE oracle for `|f̂'_t(iy)|`.
pub fn estimate_beta(d: &SampledDriver, times: &[f64], ys: &[f64], opts: &SolverOptions) -> Result<BetaFit> {
    if times.is_empty() || ys.len() < 2 {
        return Err(Error::Fit("need at least one time and two heights".into()));
    }
    if ys.iter().any(|&y| !(y > 0.0 && y.is_finite())) {
        return Err(Error::Fit("heights must be positive and finite".into()));
    }
    let maxima = ys
        .par_iter()
        .map(|&y| {
            times
                .iter()
                .map(|&t| fhat_prime(d, t, y, opts))
                .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))
        })
        .collect::<Result<Vec<f64>>>()?;
    if maxima.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Fit("derivative vanished or overflowed".into()));
    }
    let x: Vec<f64> = ys.iter().map(|y| -y.ln()).collect();
    let logs: Vec<f64> = maxima.iter().map(|v| v.ln()).collect();
    let (_, slope, residual) = ols(&x, &logs).ok_or_else(|| Error::Fit("degenerate height grid".into()))?;
    let beta = slope.clamp(0.0, 1.0 - f64::EPSILON);
    let c0 = ys
        .iter()
        .zip(&maxima)
        .map(|(y, v)| v * y.powf(beta))
        .fold(0.0, f64::max);
    let y0 = ys.iter().copied().fold(0.0, f64::max);
    Ok(BetaFit { beta, c0, y0, residual })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    /// Distance between level `i` and level `i + 1`.
    pub d_n: Vec<f64>,
    /// `−slope` of `log d_n` against `log n`; absent when some `d_n` is 0.
    pub rho_fit: Option<f64>,
    pub fit_residual: Option<f64>,
    pub decreasing: bool,
    pub beta: Option<BetaFit>,
    pub rho_target: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub version: String,
    pub rng: String,
    pub config: ConvergenceConfig,
    pub levels: Vec<usize>,
    pub runs: Vec<SeedRun>,
    pub fraction_decreasing: f64,
    pub fraction_rho_positive: f64,
    pub wall_time_s: f64,
}

fn run_seed(cfg: &ConvergenceConfig, levels: &[usize], seed: u64) -> Result<SeedRun> {
    let start = Instant::now();
    let mut drivers = vec![cfg.family.coarse(cfg.n0, seed)?];
    for level in 1..levels.len() {
        let next = cfg.family.refine(&drivers[level - 1], seed, level)?;
        drivers.push(next);
    }
    let drivers: Vec<SampledDriver> = drivers.into_iter().map(|d| d.with_mode(cfg.mode)).collect();

    // common grid: the coarsest level's sample times
    let grid: Vec<f64> = match cfg.mode {
        Interpolation::SqrtInterp => {
            let total = cfg.n0 * cfg.m;
            (0..=total).map(|j| j as f64 / total as f64).collect()
        }
        Interpolation::VerticalStep => (0..=cfg.n0).map(|k| drivers[0].time(k)).collect(),
    };
    let curves = drivers
        .par_iter()
        .map(|d| ZipperChain::build(d).sample_at(&grid))
        .collect::<Result<Vec<_>>>()?;
    let d_n = curves
        .windows(2)
        .map(|w| supnorm_distance(&w[0], &w[1], &grid))
        .collect::<Result<Vec<f64>>>()?;

    let decreasing = d_n.windows(2).all(|w| w[1] < w[0]);
    let (rho_fit, fit_residual) = if d_n.iter().all(|&v| v > 0.0) {
        let x: Vec<f64> = levels[..d_n.len()].iter().map(|&n| (n as f64).ln()).collect();
        let y: Vec<f64> = d_n.iter().map(|v| v.ln()).collect();
        match ols(&x, &y) {
            Some((_, slope, res)) => (Some(-slope), Some(res)),
            None => (None, None),
        }
    } else {
        (None, None)
    };
    let beta = match cfg.beta {
        Some(_) => None,
        None => Some(estimate_beta(
            &drivers[0],
            &cfg.beta_grid.times,
            &cfg.beta_grid.ys,
            &cfg.solver,
        )?),
    };
    let b = cfg.beta.or(beta.as_ref().map(|f| f.beta)).unwrap_or(0.0);
    Ok(SeedRun {
        seed,
        d_n,
        rho_fit,
        fit_residual,
        decreasing,
        beta,
        rho_target: rate_exponent(b),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Runs every seed in parallel; runs are reported in seed order.
pub fn convergence_study(cfg: &ConvergenceConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let start = Instant::now();
    let levels: Vec<usize> = (0..=cfg.doublings).map(|i| cfg.n0 << i).collect();
    let mut seeds = cfg.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    let runs = seeds
        .par_iter()
        .map(|&s| run_seed(cfg, &levels, s))
        .collect::<Result<Vec<_>>>()?;
    let total = runs.len() as f64;
    let fraction_decreasing = runs.iter().filter(|r| r.decreasing).count() as f64 / total;
    let fraction_rho_positive = runs.iter().filter(|r| r.rho_fit.is_some_and(|v| v > 0.0)).count() as f64 / total;
    Ok(ConvergenceReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        rng: RNG_NAME.to_string(),
        config: cfg.clone(),
        levels,
        runs,
        fraction_decreasing,
        fraction_rho_positive,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

//! Hull rasterization by blow-up times: a node `z` is marked when the
//! downward flow started at `z` meets the driver by time `t`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{solve_downward, SolverOptions};
use crate::driver::SampledDriver;
use crate::error::{Error, Result};

/// Axis-aligned window of the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RasterBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

/// Swallowed-node mask. Nodes sit at `x_min + i/resolution`,
/// `y_max − j/resolution`; row 0 is the top row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullRaster {
    pub bounds: RasterBounds,
    pub resolution: f64,
    pub width: usize,
    pub height: usize,
    pub time: f64,
    pub mask: Vec<bool>,
}

impl HullRaster {
    pub fn node(&self, col: usize, row: usize) -> Complex64 {
        Complex64::new(
            self.bounds.x_min + col as f64 / self.resolution,
            self.bounds.y_max - row as f64 / self.resolution,
        )
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.mask[row * self.width + col]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Coordinates of every marked node.
    pub fn marked(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.height)
            .flat_map(move |r| (0..self.width).map(move |c| (c, r)))
            .filter(|&(c, r)| self.get(c, r))
            .map(|(c, r)| self.node(c, r))
    }
}

/// Classifies every node of `bounds` by `T_z ≤ t`. Nodes are independent and
/// evaluated in parallel.
pub fn hull_raster(
    d: &SampledDriver,
    t: f64,
    bounds: RasterBounds,
    resolution: f64,
    opts: &SolverOptions,
) -> Result<HullRaster> {
    let RasterBounds {
        x_min,
        x_max,
        y_min,
        y_max,
    } = bounds;
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    if !(x_min.is_finite() && x_max.is_finite() && y_max.is_finite() && x_min < x_max && 0.0 < y_min && y_min < y_max) {
        return Err(Error::InvalidArgument(format!(
            "raster bounds must be a nonempty rectangle in the upper half plane, got {bounds:?}"
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("time {t} outside [0, 1]")));
    }
    let width = ((x_max - x_min) * resolution + 1e-9).floor() as usize + 1;
    let height = ((y_max - y_min) * resolution + 1e-9).floor() as usize + 1;
    let mut raster = HullRaster {
        bounds,
        resolution,
        width,
        height,
        time: t,
        mask: Vec::new(),
    };
    let mask = (0..width * height)
        .into_par_iter()
        .map(|idx| {
            let z = raster.node(idx % width, idx / width);
            if t == 0.0 {
                return Ok(false);
            }
            let r = solve_downward(d, z, t, opts)?;
            Ok(r.blown_up && r.blowup_time.is_some_and(|tz| tz <= t))
        })
        .collect::<Result<Vec<bool>>>()?;
    raster.mask = mask;
    Ok(raster)
}

//! Hull of an SLE_6 trace by blow-up times of the downward Loewner flow,
//! written as a PGM image.

use loewner::odesolver::{hull_raster, RasterBounds, SolverOptions};
use loewner::{driver, io};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    run(&out)
}

pub fn run(out: &std::path::Path) -> Result<(), Box<dyn std::error::Error>> {
    let d = driver::sample_bm(6.0, 128, 2)?;
    let res = 20.0;
    // guard distance 10 * eps_blow = one pixel
    let opts = SolverOptions {
        eps_blow: 0.1 / res,
        ..SolverOptions::default()
    };
    let bounds = RasterBounds {
        x_min: -2.0,
        x_max: 2.0,
        y_min: 0.05,
        y_max: 2.5,
    };
    for t in [0.25, 1.0] {
        let raster = hull_raster(&d, t, bounds, res, &opts)?;
        let path = out.join(format!("hull_t{t}.pgm"));
        io::write_atomic(&path, io::raster_pgm(&raster, &[d.describe()]).as_bytes())?;
        println!(
            "t={t}: {} of {} nodes swallowed -> {}",
            raster.count(),
            raster.mask.len(),
            path.display()
        );
    }
    Ok(())
}

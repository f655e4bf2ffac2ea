//! Vertical-slit variant against the tilted-slit algorithm on one Brownian
//! path: both agree at grid times for λ ≡ 0 and drift apart otherwise.

use loewner::diagnostics::supnorm_distance;
use loewner::{driver, Interpolation, ZipperChain};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 128;
    let grid: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    for (label, d) in [
        ("zero", driver::zero_driver(n)?),
        ("bm kappa=2", driver::sample_bm(2.0, n, 4)?),
    ] {
        let tilted = ZipperChain::build(&d).sample_at(&grid)?;
        let vertical = ZipperChain::build(&d.with_mode(Interpolation::VerticalStep)).sample_at(&grid)?;
        let dist = supnorm_distance(&tilted, &vertical, &grid)?;
        println!("{label:>12}: sup |tilted - vertical| on grid = {dist:.3e}");
    }
    Ok(())
}

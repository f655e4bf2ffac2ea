//! Perturbed grid values: uniform noise of size ε on the driver moves the
//! curve by an amount that shrinks with ε.

use loewner::diagnostics::supnorm_distance;
use loewner::driver::{perturb, sample_bm};
use loewner::ZipperChain;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = sample_bm(2.0, 128, 5)?;
    let base = ZipperChain::build(&d).simulate(2)?;
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let p = ZipperChain::build(&perturb(&d, eps, 9)?).simulate(2)?;
        println!(
            "eps={eps:.0e}: sup distance {:.3e}",
            supnorm_distance(&base, &p, &base.times)?
        );
    }
    Ok(())
}

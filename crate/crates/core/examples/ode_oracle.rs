//! The reference integrator: downward flow, inverse by time reversal, and
//! blow-up times.

use loewner::driver::{sample_bm, zero_driver};
use loewner::odesolver::{fhat, inverse_check, solve_downward, SolverOptions};
use loewner::ZipperChain;
use num_complex::Complex64;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = SolverOptions::default();
    let d = sample_bm(2.0, 64, 1)?;
    let z = Complex64::new(0.3, 0.8);
    let (w, back) = inverse_check(&d, z, 1.0, &opts)?;
    println!("g_1^-1({z}) = {w:.6}, round trip error {:.1e}", (back - z).norm());

    let chain = ZipperChain::build(&d);
    for k in [16, 64] {
        let y = Complex64::new(0.0, 0.3);
        let a = chain.fhat(k, y)?;
        let b = fhat(&d, d.time(k), y, &opts)?;
        println!("k={k}: composition {a:.8}, ODE {b:.8}");
    }

    // the point iy is swallowed at t = y^2/4 by the zero driver
    let r = solve_downward(&zero_driver(4)?, Complex64::new(0.0, 1.0), 1.0, &opts)?;
    println!("blow-up of i: {:?} (exact 0.25)", r.blowup_time);
    Ok(())
}

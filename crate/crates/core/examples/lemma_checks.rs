//! Numerical checks of the estimates behind the algorithm on a few SLE traces.

use loewner::diagnostics::checks::{
    check_g_monotone, check_hcap_diam, check_oscillation, check_perturbation, check_perturbation_random, check_simple,
};
use loewner::odesolver::{Forcing, SolverOptions};
use loewner::{driver, Interpolation, Provenance, SampledDriver, ZipperChain};
use num_complex::Complex64;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = SolverOptions::default();
    println!("{:?}", check_g_monotone(1000, 1));

    for kappa in [8.0 / 3.0, 6.0] {
        let d = driver::sample_bm(kappa, 128, 1)?;
        let curve = ZipperChain::build(&d).simulate(4)?;
        let osc = check_oscillation(&curve, &d);
        let simple = check_simple(&curve);
        let hcap = check_hcap_diam(&d, 1.0, 4)?;
        println!(
            "kappa={kappa:.3}: oscillation {} (slack {:.2e}), simple {}, hcap ratio {:.3}",
            osc.passed, osc.worst_slack, simple.passed, hcap.ratio
        );
    }

    let w1 = SampledDriver::new(vec![0.0, 0.0], Interpolation::SqrtInterp, Provenance::Custom)?;
    let w2 = SampledDriver::new(vec![0.1, 0.1], Interpolation::SqrtInterp, Provenance::Custom)?;
    let r = check_perturbation(
        Forcing::Direct(&w1),
        Forcing::Direct(&w2),
        Complex64::new(0.0, 1.0),
        1.0,
        &opts,
    )?;
    println!("perturbation bound: lhs {:.5} <= rhs {:.5}: {}", r.lhs, r.rhs, r.holds);
    println!("{:?}", check_perturbation_random(100, 1, &opts)?);
    Ok(())
}

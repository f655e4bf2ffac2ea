//! Random-walk drivers: every step is a slit of angle aπ or (1 − a)π, and
//! the composed map agrees with the Loewner ODE.

use loewner::diagnostics::checks::check_oracle;
use loewner::driver::{kappa_to_a, sample_rw};
use loewner::odesolver::SolverOptions;
use loewner::ZipperChain;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kappa = 8.0 / 3.0;
    let a = kappa_to_a(kappa)?;
    let d = sample_rw(kappa, 64, 3)?;
    let chain = ZipperChain::build(&d);
    let angles: Vec<f64> = chain.slit_params().unwrap().iter().map(|p| p.alpha).collect();
    let low = angles.iter().filter(|&&x| (x - a).abs() < 1e-12).count();
    println!("a = {a:.7}; {low} steps at a, {} at 1 - a", angles.len() - low);

    let r = check_oracle(
        &chain,
        &d,
        &[8, 16, 32, 64],
        &[0.1, 0.3, 1.0],
        1e-6,
        &SolverOptions::default(),
    )?;
    println!(
        "max relative deviation from the ODE: {:.2e} (pass {})",
        r.max_rel_error, r.passed
    );
    Ok(())
}

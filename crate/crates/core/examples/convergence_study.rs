//! Coupled convergence: successive sup-norm distances between levels
//! n0, 2 n0, 4 n0, ... and the fitted rate.

use loewner::diagnostics::convergence::{convergence_study, ConvergenceConfig, DriverFamily};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    for family in [DriverFamily::Sqrt { c: 1.0 }, DriverFamily::Brownian { kappa: 2.0 }] {
        let cfg = ConvergenceConfig {
            beta: Some(0.0),
            ..ConvergenceConfig::new(family, (1..=4).collect(), 32, 3)
        };
        let report = convergence_study(&cfg)?;
        println!("{family:?} levels {:?}", report.levels);
        for run in &report.runs {
            let d: Vec<String> = run.d_n.iter().map(|v| format!("{v:.3e}")).collect();
            println!(
                "  seed {:>2}: d_n [{}] rho {:.3} (target {:.3})",
                run.seed,
                d.join(", "),
                run.rho_fit.unwrap_or(f64::NAN),
                run.rho_target
            );
        }
        println!(
            "  decreasing {:.0}%, rho > 0 {:.0}%",
            100.0 * report.fraction_decreasing,
            100.0 * report.fraction_rho_positive
        );
    }
    Ok(())
}

//! SLE traces for κ = 8/3 and κ = 6, written as SVG and CSV.
//!
//! `cargo run --release --example simulate_sle -- [out_dir] [n]`

use std::path::{Path, PathBuf};

use loewner::{driver, io, ZipperChain};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out: PathBuf = args.next().map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(400);
    run(&out, n)
}

pub fn run(out: &Path, n: usize) -> Result<(), Box<dyn std::error::Error>> {
    for (name, kappa) in [("8_3", 8.0 / 3.0), ("6", 6.0)] {
        let d = driver::sample_bm(kappa, n, 1)?;
        let curve = ZipperChain::build(&d).simulate(4)?;
        let meta = vec![d.describe()];
        let svg = out.join(format!("sle_{name}.svg"));
        io::write_atomic(&svg, io::curve_svg(&curve, &meta).as_bytes())?;
        io::write_atomic(
            &out.join(format!("sle_{name}.csv")),
            io::curve_csv(&curve, &meta).as_bytes(),
        )?;
        let tip = curve.points.last().unwrap();
        println!(
            "kappa={kappa:.4} points={} tip={tip:.4} -> {}",
            curve.len(),
            svg.display()
        );
    }
    Ok(())
}

//! Command-line front end: `simulate`, `hull`, `converge` and `checks`.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 a check
//! failed.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::diagnostics::checks::{
    check_g_monotone, check_hcap_diam, check_oracle, check_oscillation, check_perturbation, check_perturbation_random,
    check_simple, CheckReport,
};
use crate::diagnostics::convergence::{convergence_study, ConvergenceConfig, DriverFamily};
use crate::driver::{self, Interpolation, SampledDriver};
use crate::error::{Error, Result};
use crate::io;
use crate::odesolver::{hull_raster, Forcing, RasterBounds, SolverOptions};
use crate::zipper::ZipperChain;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "loewner",
    version,
    about = "Loewner curve and SLE simulation by slit-map composition"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a curve and write CSV and/or SVG.
    Simulate(SimulateArgs),
    /// Rasterize the hull by blow-up times and write a PGM image.
    Hull(HullArgs),
    /// Run a coupled convergence study and write a JSON report.
    Converge(ConvergeArgs),
    /// Run the diagnostic check suite and write a JSON summary.
    Checks(ChecksArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DriverKind {
    Bm,
    Rw,
    Sqrt,
    Zero,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Tilted,
    Vertical,
}

impl From<Mode> for Interpolation {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Tilted => Interpolation::SqrtInterp,
            Mode::Vertical => Interpolation::VerticalStep,
        }
    }
}

/// Parses `κ` as a decimal or a ratio such as `8/3`.
pub fn parse_rational(s: &str) -> std::result::Result<f64, String> {
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            p / q
        }
        None => s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a finite nonnegative value, got {s:?}"))
    }
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("expected a finite positive number, got {s:?}")),
    }
}

fn parse_finite(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("expected a finite number, got {s:?}")),
    }
}

/// Seeds given as `a..b` (inclusive) or a comma-separated list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedList(pub Vec<u64>);

fn parse_seed_list(s: &str) -> std::result::Result<SeedList, String> {
    parse_seeds(s).map(SeedList)
}

pub fn parse_seeds(s: &str) -> std::result::Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| format!("bad seed range {s:?}"))?;
        let b: u64 = b.trim().parse().map_err(|_| format!("bad seed range {s:?}"))?;
        if a > b {
            return Err(format!("empty seed range {s:?}"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|_| format!("bad seed {x:?}")))
        .collect()
}

#[derive(Debug, Clone, Args)]
pub struct DriverArgs {
    #[arg(long, value_enum, default_value = "zero")]
    pub driver: DriverKind,
    /// κ for bm and rw drivers; decimal or ratio such as 8/3.
    #[arg(long, default_value = "0", value_parser = parse_rational)]
    pub kappa: f64,
    /// Coefficient of the c√t driver.
    #[arg(long, default_value = "0", value_parser = parse_finite)]
    pub c: f64,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Driver file: `n` on the first line, then `n + 1` values.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Uniform noise bound added to every grid value.
    #[arg(long, value_parser = parse_finite)]
    pub perturb: Option<f64>,
    /// Seed of the perturbation; defaults to `--seed`.
    #[arg(long)]
    pub perturb_seed: Option<u64>,
    #[arg(long, value_enum, default_value = "tilted")]
    pub mode: Mode,
}

impl DriverArgs {
    pub fn build(&self) -> Result<SampledDriver> {
        let n = self.n as usize;
        let mode = Interpolation::from(self.mode);
        let d = match self.driver {
            DriverKind::Bm => driver::sample_bm(self.kappa, n, self.seed)?,
            DriverKind::Rw => driver::sample_rw(self.kappa, n, self.seed)?,
            DriverKind::Sqrt => driver::sqrt_driver(self.c, n)?,
            DriverKind::Zero => driver::zero_driver(n)?,
            DriverKind::File => {
                let path = self
                    .file
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument("--driver file needs --file".into()))?;
                driver::load_driver(path, mode)?
            }
        };
        let d = match self.perturb {
            Some(eps) => driver::perturb(&d, eps, self.perturb_seed.unwrap_or(self.seed))?,
            None => d,
        };
        Ok(d.with_mode(mode))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Relative tolerance of the reference integrator.
    #[arg(long, default_value_t = 1e-10, value_parser = parse_positive)]
    pub tol: f64,
    /// Blow-up threshold; `hull` defaults to a tenth of a pixel.
    #[arg(long, value_parser = parse_positive)]
    pub eps_blow: Option<f64>,
}

impl SolverArgs {
    fn options(&self, default_eps_blow: f64) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            eps_blow: self.eps_blow.unwrap_or(default_eps_blow),
            ..SolverOptions::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub driver: DriverArgs,
    /// Samples per step (tilted mode).
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub m: u64,
    /// CSV output; written to stdout when neither --csv nor --svg is given.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct HullArgs {
    #[command(flatten)]
    pub driver: DriverArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 1.0, value_parser = parse_finite)]
    pub t: f64,
    #[arg(long, default_value_t = -2.0, value_parser = parse_finite, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 2.0, value_parser = parse_finite, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 0.02, value_parser = parse_finite, allow_negative_numbers = true)]
    pub y_min: f64,
    #[arg(long, default_value_t = 3.0, value_parser = parse_finite, allow_negative_numbers = true)]
    pub y_max: f64,
    /// Nodes per unit length.
    #[arg(long, default_value_t = 50.0, value_parser = parse_positive)]
    pub resolution: f64,
    /// PGM output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Bm,
    Sqrt,
    Zero,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[arg(long, value_enum, default_value = "bm")]
    pub family: FamilyKind,
    #[arg(long, default_value = "2", value_parser = parse_rational)]
    pub kappa: f64,
    #[arg(long, default_value = "1", value_parser = parse_finite)]
    pub c: f64,
    /// `a..b` or a comma-separated list.
    #[arg(long, default_value = "1..20", value_parser = parse_seed_list)]
    pub seeds: SeedList,
    #[arg(long, default_value_t = 100)]
    pub n0: usize,
    #[arg(long, default_value_t = 3)]
    pub doublings: usize,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "tilted")]
    pub mode: Mode,
    /// Known β; estimated per seed when absent.
    #[arg(long, value_parser = parse_finite)]
    pub beta: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// JSON output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ChecksArgs {
    #[command(flatten)]
    pub driver: DriverArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    /// Random slit maps for the monotonicity check.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Random constant-driver pairs for the perturbation bound.
    #[arg(long, default_value_t = 20)]
    pub perturbation_pairs: usize,
    /// Flip the sign of every slit map (negative control; the suite must fail).
    #[arg(long, hide = true)]
    pub inject_sign_flip: bool,
    /// JSON output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Solver(_) | Error::Fit(_) => EXIT_NUMERICAL,
        _ => EXIT_INVALID,
    }
}

/// Metadata lines for reproducing a run: version, generator and arguments.
fn metadata(argv: &[String], d: &SampledDriver) -> Vec<String> {
    vec![
        format!("loewner {}", env!("CARGO_PKG_VERSION")),
        format!("command: {}", argv.join(" ")),
        d.describe(),
    ]
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => io::write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run_simulate(args: &SimulateArgs, argv: &[String]) -> Result<()> {
    let d = args.driver.build()?;
    let curve = ZipperChain::build(&d).simulate(args.m as usize)?;
    let mut meta = metadata(argv, &d);
    meta.push(format!("m={} points={}", args.m, curve.len()));
    if args.csv.is_some() || args.svg.is_none() {
        emit(args.csv.as_ref(), &io::curve_csv(&curve, &meta))?;
    }
    if let Some(p) = &args.svg {
        io::write_atomic(p, io::curve_svg(&curve, &meta).as_bytes())?;
    }
    Ok(())
}

pub fn run_hull(args: &HullArgs, argv: &[String]) -> Result<()> {
    let d = args.driver.build()?;
    let opts = args.solver.options(0.1 / args.resolution);
    let bounds = RasterBounds {
        x_min: args.x_min,
        x_max: args.x_max,
        y_min: args.y_min,
        y_max: args.y_max,
    };
    let raster = hull_raster(&d, args.t, bounds, args.resolution, &opts)?;
    let mut meta = metadata(argv, &d);
    meta.push(format!(
        "t={} resolution={} eps_blow={} marked={}",
        args.t,
        args.resolution,
        opts.eps_blow,
        raster.count()
    ));
    emit(args.out.as_ref(), &io::raster_pgm(&raster, &meta))
}

pub fn run_converge(args: &ConvergeArgs) -> Result<bool> {
    let family = match args.family {
        FamilyKind::Bm => DriverFamily::Brownian { kappa: args.kappa },
        FamilyKind::Sqrt => DriverFamily::Sqrt { c: args.c },
        FamilyKind::Zero => DriverFamily::Zero,
    };
    let cfg = ConvergenceConfig {
        m: args.m,
        mode: args.mode.into(),
        beta: args.beta,
        solver: args.solver.options(SolverOptions::default().eps_blow),
        ..ConvergenceConfig::new(family, args.seeds.0.clone(), args.n0, args.doublings)
    };
    let report = convergence_study(&cfg)?;
    emit(args.out.as_ref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    Ok(true)
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub version: String,
    pub driver: String,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

/// Runs every check on the configured driver and aggregates the results.
pub fn run_checks(args: &ChecksArgs) -> Result<SuiteReport> {
    let d = args.driver.build()?;
    let opts = args.solver.options(SolverOptions::default().eps_blow);
    let chain = if args.inject_sign_flip {
        ZipperChain::build(&d.negated())
    } else {
        ZipperChain::build(&d)
    };
    let n = d.n();
    let mut ks: Vec<usize> = [n / 4, n / 2, n].into_iter().filter(|&k| k > 0).collect();
    ks.dedup();
    let oracle = check_oracle(&chain, &d, &ks, &[0.1, 0.3, 1.0], 1e-6, &opts)?;
    let mut checks = vec![CheckReport::new(
        "oracle",
        ks.len() * 3,
        oracle.tolerance - oracle.max_rel_error,
        0.0,
        Some(crate::diagnostics::Violation {
            time: Some(d.time(oracle.worst_k)),
            point: Some(Complex64::new(0.0, oracle.worst_y)),
            detail: format!("relative error {:e}", oracle.max_rel_error),
        }),
    )];

    let curve = chain.simulate(args.m.max(1))?;
    checks.push(check_oscillation(&curve, &d));
    checks.push(check_simple(&curve));
    checks.push(check_g_monotone(args.trials, args.driver.seed));

    let zero = SampledDriver::new(vec![0.0, 0.0], Interpolation::SqrtInterp, driver::Provenance::Custom)?;
    let shifted = SampledDriver::new(vec![0.1, 0.1], Interpolation::SqrtInterp, driver::Provenance::Custom)?;
    let worked = check_perturbation(
        Forcing::Direct(&zero),
        Forcing::Direct(&shifted),
        Complex64::new(0.0, 1.0),
        1.0,
        &opts,
    )?;
    checks.push(CheckReport::new(
        "perturbation_example",
        1,
        worked.rhs * (1.0 + 1e-6) - worked.lhs,
        0.0,
        Some(crate::diagnostics::Violation {
            time: Some(1.0),
            point: Some(Complex64::new(0.0, 1.0)),
            detail: format!("lhs {} rhs {}", worked.lhs, worked.rhs),
        }),
    ));
    checks.push(check_perturbation_random(
        args.perturbation_pairs,
        args.driver.seed,
        &opts,
    )?);

    let hcap = check_hcap_diam(&d, 1.0, args.m.max(1))?;
    let mut h = CheckReport::new(
        "hcap_diam",
        1,
        crate::diagnostics::checks::HCAP_RATIO_MAX - hcap.ratio,
        0.0,
        Some(crate::diagnostics::Violation {
            time: Some(1.0),
            point: None,
            detail: format!("ratio {}", hcap.ratio),
        }),
    );
    h.passed = hcap.passed;
    checks.push(h);

    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        driver: d.describe(),
        checks,
        passed,
    })
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => run_simulate(a, &argv).map(|_| EXIT_OK),
        Command::Hull(a) => run_hull(a, &argv).map(|_| EXIT_OK),
        Command::Converge(a) => run_converge(a).map(|_| EXIT_OK),
        Command::Checks(a) => run_checks(a).and_then(|r| {
            emit(a.out.as_ref(), &(serde_json::to_string_pretty(&r)? + "\n"))?;
            for c in r.checks.iter().filter(|c| !c.passed) {
                eprintln!("check {} failed: {:?}", c.name, c.violation);
            }
            Ok(if r.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

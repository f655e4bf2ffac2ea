//! Numerical checks of the geometric estimates behind the algorithm.
//!
//! Each check is deterministic given its inputs and seeds and returns a
//! [`CheckReport`] with the worst slack observed (negative means violated).

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::first_self_intersection;
use crate::driver::{rng_for, Interpolation, SampledDriver};
use crate::error::{Error, Result};
use crate::odesolver::{self, Forcing, SolverOptions};
use crate::slitmap::SlitParams;
use crate::zipper::{Curve, ZipperChain};

/// Tolerance of the curve bounds `|Re z| ≤ osc` and `Im z ≤ 2√t`.
pub const OSCILLATION_TOL: f64 = 1e-9;
/// Largest accepted `hcap / (diam · height)`.
pub const HCAP_RATIO_MAX: f64 = 10.0;
const STREAM_CHECKS: u64 = 17;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub time: Option<f64>,
    pub point: Option<Complex64>,
    pub detail: String,
}

/// Machine-readable outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub samples: usize,
    /// Smallest margin to the bound over all samples.
    pub worst_slack: f64,
    pub violation: Option<Violation>,
}

impl CheckReport {
    pub(crate) fn new(name: &str, samples: usize, worst_slack: f64, tol: f64, violation: Option<Violation>) -> Self {
        Self {
            name: name.to_string(),
            passed: worst_slack >= -tol,
            samples,
            worst_slack,
            violation: if worst_slack >= -tol { None } else { violation },
        }
    }
}

/// Tracks the smallest slack and where it occurred.
struct Worst {
    slack: f64,
    at: Option<Violation>,
}

impl Worst {
    fn new() -> Self {
        Self {
            slack: f64::INFINITY,
            at: None,
        }
    }

    fn update(&mut self, slack: f64, at: impl FnOnce() -> Violation) {
        if slack < self.slack || slack.is_nan() {
            self.slack = if slack.is_nan() { f64::NEG_INFINITY } else { slack };
            self.at = Some(at());
        }
    }
}

/// Every sample satisfies `|Re z − λ(0)| ≤ sup_{s≤r≤t} |λ(r) − λ(s)|` and
/// `Im z ≤ 2√t`, with `λ` the interpolated driver that produced the curve.
pub fn check_oscillation(curve: &Curve, d: &SampledDriver) -> CheckReport {
    let n = d.n();
    let vals = d.values();
    let base = vals[0];
    // prefix ranges of grid values
    let mut lo = Vec::with_capacity(n + 1);
    let mut hi = Vec::with_capacity(n + 1);
    let (mut a, mut b) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in vals {
        a = a.min(v);
        b = b.max(v);
        lo.push(a);
        hi.push(b);
    }
    let mut worst = Worst::new();
    for (&t, &z) in curve.times.iter().zip(&curve.points) {
        let (min, max) = match d.mode() {
            Interpolation::SqrtInterp => {
                let (k, _) = crate::driver::locate(n, t);
                let v = d.value_at(t);
                (lo[k].min(v), hi[k].max(v))
            }
            Interpolation::VerticalStep => {
                // tip at t_k is generated by λ(t_0), …, λ(t_{k−1})
                let k = ((t * n as f64).round() as usize).min(n);
                let idx = k.saturating_sub(1);
                (lo[idx], hi[idx])
            }
        };
        let re_slack = (max - min) - (z.re - base).abs();
        let im_slack = 2.0 * t.max(0.0).sqrt() - z.im;
        let slack = re_slack.min(im_slack);
        worst.update(slack, || Violation {
            time: Some(t),
            point: Some(z),
            detail: format!("real-part slack {re_slack:e}, imaginary-part slack {im_slack:e}"),
        });
    }
    CheckReport::new("oscillation", curve.len(), worst.slack, OSCILLATION_TOL, worst.at)
}

fn monotone_grid() -> Vec<f64> {
    (0..100).map(|i| 10f64.powf(-6.0 + 9.0 * i as f64 / 99.0)).collect()
}

/// Smallest relative increase of `Im G(iy)` between consecutive points of a
/// 100-point log grid over `[1e−6, 1e3]`, starting from the tip height.
/// Positive iff the sequence is strictly increasing.
pub fn g_monotone_slack(p: &SlitParams) -> (f64, f64) {
    let mut worst = (f64::INFINITY, 0.0);
    let mut prev = p.tip().im;
    for y in monotone_grid() {
        let im = p.apply(Complex64::new(0.0, y)).im;
        let slack = (im - prev) / prev.abs().max(f64::MIN_POSITIVE);
        if !(slack >= worst.0) {
            worst = (if slack.is_nan() { f64::NEG_INFINITY } else { slack }, y);
        }
        prev = im;
    }
    worst
}

/// `y ↦ Im G(iy)` is strictly increasing on the grid of
/// [`g_monotone_slack`] for `trials` random slit maps.
pub fn check_g_monotone(trials: usize, seed: u64) -> CheckReport {
    let mut rng = rng_for(seed, STREAM_CHECKS);
    let params: Vec<SlitParams> = (0..trials)
        .map(|_| {
            let c: f64 = rng.gen_range(-20.0..20.0);
            let dt = 10f64.powf(rng.gen_range(-6.0..0.0));
            SlitParams::from_step_unchecked(c * dt.sqrt(), dt)
        })
        .collect();
    let slacks: Vec<(f64, f64)> = params.par_iter().map(g_monotone_slack).collect();
    let (idx, &(slack, y)) = slacks
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .unwrap_or((0, &(f64::INFINITY, 0.0)));
    let at = Violation {
        time: None,
        point: Some(Complex64::new(0.0, y)),
        detail: params
            .get(idx)
            .map(|p| format!("Im G(iy) not increasing for {p:?}"))
            .unwrap_or_default(),
    };
    let mut report = CheckReport::new("g_monotone", trials * 100, slack, 0.0, Some(at));
    // strict increase: any nonpositive step fails
    if slack <= 0.0 {
        report.passed = false;
    }
    report
}

/// Both sides of the perturbation bound for two upward flows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    /// `sup_{s ≤ T} |W₁(s) − W₂(s)|`.
    pub eps: f64,
    /// `|f_T^{(1)}(u) − f_T^{(2)}(u)|`.
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `sup |ξ₁ − ξ₂|` over `[0, T]`, sampled at both drivers' grid times and
/// the endpoints. Exact when both share a grid and are square-root or step
/// interpolants of the same kind.
fn forcing_gap(w1: &Forcing<'_>, w2: &Forcing<'_>, big_t: f64) -> f64 {
    let mut times = vec![0.0, big_t];
    for w in [w1, w2] {
        let (d, offset, flip) = match w {
            Forcing::Direct(d) => (*d, 0.0, false),
            Forcing::Reversed { driver, horizon } => (*driver, *horizon, true),
        };
        for k in 0..=d.n() {
            let tk = d.time(k);
            let s = if flip { offset - tk } else { tk };
            if (0.0..=big_t).contains(&s) {
                times.push(s);
                // left limit, for step drivers
                times.push((s - 1e-12).max(0.0));
            }
        }
    }
    times
        .into_iter()
        .map(|s| (w1.value_at(s) - w2.value_at(s)).abs())
        .fold(0.0, f64::max)
}

/// Evaluates `|f₁(u) − f₂(u)| ≤ ε exp{½ [log(I|f₁'|/y) log(I|f₂'|/y)]^{1/2} + log log(I/y)}`
/// with `I = √(4T + y²)`.
pub fn check_perturbation(
    w1: Forcing<'_>,
    w2: Forcing<'_>,
    u: Complex64,
    big_t: f64,
    opts: &SolverOptions,
) -> Result<PerturbationReport> {
    if !(u.im > 0.0) {
        return Err(Error::LowerHalfPlane(u));
    }
    let (f1, d1) = odesolver::upward_with_derivative(w1, u, big_t, opts)?;
    let (f2, d2) = odesolver::upward_with_derivative(w2, u, big_t, opts)?;
    let eps = forcing_gap(&w1, &w2, big_t);
    let y = u.im;
    let i_ty = (4.0 * big_t + y * y).sqrt();
    let l1 = (i_ty * d1.norm() / y).ln();
    let l2 = (i_ty * d2.norm() / y).ln();
    let rhs = if big_t == 0.0 {
        0.0
    } else {
        eps * (0.5 * (l1 * l2).max(0.0).sqrt() + (i_ty / y).ln().ln()).exp()
    };
    let lhs = (f1 - f2).norm();
    Ok(PerturbationReport {
        eps,
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-6) || lhs == 0.0,
    })
}

/// The bound on `pairs` random pairs of constant drivers `W₁ ≡ c₁`,
/// `W₂ ≡ c₂` with `|c₁ − c₂| ≤ 0.2`, random `u` and `T ∈ (0, 1]`. Slack is
/// `rhs (1 + 1e−6) − lhs`.
pub fn check_perturbation_random(pairs: usize, seed: u64, opts: &SolverOptions) -> Result<CheckReport> {
    let mut rng = rng_for(seed, STREAM_CHECKS + 1);
    let cases: Vec<(f64, f64, Complex64, f64)> = (0..pairs)
        .map(|_| {
            let c1: f64 = rng.gen_range(-1.0..1.0);
            let c2 = c1 + rng.gen_range(-0.2..=0.2);
            let u = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.05..2.0));
            let big_t = rng.gen_range(0.05..=1.0);
            (c1, c2, u, big_t)
        })
        .collect();
    let results = cases
        .par_iter()
        .map(|&(c1, c2, u, big_t)| {
            let w1 = constant_driver(c1)?;
            let w2 = constant_driver(c2)?;
            let r = check_perturbation(Forcing::Direct(&w1), Forcing::Direct(&w2), u, big_t, opts)?;
            Ok((r.rhs * (1.0 + 1e-6) - r.lhs, c1, c2, u, big_t))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst = Worst::new();
    for (slack, c1, c2, u, big_t) in results {
        worst.update(slack, || Violation {
            time: Some(big_t),
            point: Some(u),
            detail: format!("constant drivers {c1} and {c2}"),
        });
    }
    Ok(CheckReport::new("perturbation", pairs, worst.slack, 0.0, worst.at))
}

fn constant_driver(c: f64) -> Result<SampledDriver> {
    SampledDriver::new(vec![c, c], Interpolation::SqrtInterp, crate::driver::Provenance::Custom)
}

/// Ratio `hcap / (diam · height)` of the simulated hull at time `t`, with
/// the capacity time `t` standing in for the capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HcapReport {
    pub t: f64,
    pub diam: f64,
    pub height: f64,
    pub ratio: f64,
    pub passed: bool,
}

pub fn check_hcap_diam(d: &SampledDriver, t: f64, m: usize) -> Result<HcapReport> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidArgument(format!("time {t} outside (0, 1]")));
    }
    let chain = ZipperChain::build(d);
    let mut times: Vec<f64> = match d.mode() {
        Interpolation::SqrtInterp => {
            let total = d.n() * m.max(1);
            (0..=total)
                .map(|j| j as f64 / total as f64)
                .filter(|&s| s < t)
                .collect()
        }
        Interpolation::VerticalStep => (0..=d.n()).map(|k| d.time(k)).filter(|&s| s <= t).collect(),
    };
    if d.mode() == Interpolation::SqrtInterp {
        times.push(t);
    }
    let curve = chain.sample_at(&times)?;
    let pts = &curve.points;
    let diam = pts
        .par_iter()
        .enumerate()
        .map(|(i, p)| pts[i + 1..].iter().map(|q| (p - q).norm()).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max);
    let height = pts.iter().map(|p| p.im).fold(0.0, f64::max);
    let ratio = t / (diam * height);
    Ok(HcapReport {
        t,
        diam,
        height,
        ratio,
        passed: ratio > 0.0 && ratio <= HCAP_RATIO_MAX,
    })
}

/// The sampled polyline has no self-intersections.
pub fn check_simple(curve: &Curve) -> CheckReport {
    match first_self_intersection(&curve.points) {
        None => CheckReport::new("simple", curve.len(), 0.0, 0.0, None),
        Some((i, j)) => {
            let mut r = CheckReport::new(
                "simple",
                curve.len(),
                f64::NEG_INFINITY,
                0.0,
                Some(Violation {
                    time: Some(curve.times[i]),
                    point: Some(curve.points[i]),
                    detail: format!("segments {i} and {j} intersect"),
                }),
            );
            r.passed = false;
            r
        }
    }
}

/// Maximum relative deviation between `chain.fhat(k, iy)` and the upward
/// ODE solution of `oracle` reversed on `[0, t_k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub max_rel_error: f64,
    pub worst_k: usize,
    pub worst_y: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn check_oracle(
    chain: &ZipperChain,
    oracle: &SampledDriver,
    ks: &[usize],
    ys: &[f64],
    tolerance: f64,
    opts: &SolverOptions,
) -> Result<OracleReport> {
    if oracle.n() != chain.n() {
        return Err(Error::InvalidArgument(
            "oracle driver must share the chain's grid".into(),
        ));
    }
    let pairs: Vec<(usize, f64)> = ks.iter().flat_map(|&k| ys.iter().map(move |&y| (k, y))).collect();
    let errors = pairs
        .par_iter()
        .map(|&(k, y)| {
            let z = Complex64::new(0.0, y);
            let zipped = chain.fhat(k, z)?;
            let reference = odesolver::fhat(oracle, oracle.time(k), z, opts)?;
            Ok(((zipped - reference).norm() / reference.norm(), k, y))
        })
        .collect::<Result<Vec<_>>>()?;
    let (max_rel_error, worst_k, worst_y) = errors
        .into_iter()
        .fold((0.0, 0, 0.0), |acc, e| if e.0 > acc.0 { e } else { acc });
    Ok(OracleReport {
        max_rel_error,
        worst_k,
        worst_y,
        tolerance,
        passed: max_rel_error <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::{sample_bm, sqrt_driver, zero_driver, Provenance};

    fn constant(v: f64) -> SampledDriver {
        SampledDriver::new(vec![v; 5], Interpolation::SqrtInterp, Provenance::Custom).unwrap()
    }

    #[test]
    fn oscillation_on_zero_driver_saturates_im_bound() {
        let d = zero_driver(32).unwrap();
        let curve = ZipperChain::build(&d).simulate(2).unwrap();
        let r = check_oscillation(&curve, &d);
        assert!(r.passed);
        assert!(r.worst_slack.abs() < 1e-12);
    }

    #[test]
    fn oscillation_single_step() {
        for c in [-2.0, 0.5, 3.0] {
            let d = sqrt_driver(c, 1).unwrap();
            let curve = ZipperChain::build(&d).simulate(50).unwrap();
            let r = check_oscillation(&curve, &d);
            assert!(r.passed, "{r:?}");
            for (t, z) in curve.times.iter().zip(&curve.points) {
                assert!(z.re.abs() <= c.abs() * t.sqrt() + 1e-12);
            }
        }
    }

    #[test]
    fn oscillation_detects_violation() {
        let d = zero_driver(4).unwrap();
        let mut curve = ZipperChain::build(&d).simulate(1).unwrap();
        curve.points[2] += Complex64::new(0.1, 0.0);
        let r = check_oscillation(&curve, &d);
        assert!(!r.passed);
        assert_eq!(r.violation.unwrap().time, Some(0.5));
    }

    #[test]
    fn g_monotone_small_batch() {
        let r = check_g_monotone(200, 3);
        assert!(r.passed, "{r:?}");
        assert_eq!(r.samples, 200 * 100);
    }

    #[test]
    fn g_monotone_examples() {
        let sym = SlitParams {
            alpha: 0.5,
            a: 2.0,
            b: 2.0,
            dt: 1.0,
            dlambda: 0.0,
        };
        assert!(g_monotone_slack(&sym).0 > 0.0);
        for y in [0.1, 1.0, 10.0] {
            let v = sym.apply(Complex64::new(0.0, y)).im;
            assert!((v - (y * y + 4.0f64).sqrt()).abs() < 1e-12);
        }
        let tilted = SlitParams {
            alpha: 0.2,
            a: 4.0,
            b: 1.0,
            dt: 1.0,
            dlambda: 3.0,
        };
        assert!(g_monotone_slack(&tilted).0 > 0.0);
    }

    #[test]
    fn perturbation_worked_example() {
        let w1 = constant(0.0);
        let w2 = constant(0.1);
        let r = check_perturbation(
            Forcing::Direct(&w1),
            Forcing::Direct(&w2),
            Complex64::new(0.0, 1.0),
            1.0,
            &SolverOptions::default(),
        )
        .unwrap();
        assert!((r.eps - 0.1).abs() < 1e-15);
        assert!((r.lhs - 0.0552).abs() < 1e-3, "{r:?}");
        assert!((r.rhs - 0.0805).abs() < 1e-3, "{r:?}");
        assert!(r.holds);

        let same = check_perturbation(
            Forcing::Direct(&w2),
            Forcing::Direct(&w2),
            Complex64::new(0.3, 0.5),
            1.0,
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(same.lhs, 0.0);
        assert!(same.holds);
    }

    #[test]
    fn perturbation_random_pairs_hold() {
        let r = check_perturbation_random(10, 1, &SolverOptions::default()).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.worst_slack.is_finite());
    }

    #[test]
    fn hcap_ratio_zero_driver() {
        let d = zero_driver(16).unwrap();
        for t in [0.25, 1.0] {
            let r = check_hcap_diam(&d, t, 4).unwrap();
            assert!((r.diam - 2.0 * t.sqrt()).abs() < 1e-12);
            assert!((r.ratio - 0.25).abs() < 1e-12);
            assert!(r.passed);
        }
        for c in [-3.0, 1.0, 4.0] {
            let r = check_hcap_diam(&sqrt_driver(c, 8).unwrap(), 1.0, 4).unwrap();
            assert!(r.passed && r.ratio > 0.0, "{r:?}");
        }
    }

    #[test]
    fn oracle_check_and_negative_control() {
        let d = sample_bm(2.0, 16, 4).unwrap();
        let opts = SolverOptions::default();
        let ok = check_oracle(&ZipperChain::build(&d), &d, &[4, 16], &[0.1, 1.0], 1e-6, &opts).unwrap();
        assert!(ok.passed, "{ok:?}");
        // a chain whose slit maps have the wrong sign must be caught
        let flipped = ZipperChain::build(&d.negated());
        let bad = check_oracle(&flipped, &d, &[4, 16], &[0.1, 1.0], 1e-6, &opts).unwrap();
        assert!(!bad.passed);
    }

    #[test]
    fn simplicity_flags_crossings() {
        let d = sample_bm(8.0 / 3.0, 32, 2).unwrap();
        let mut curve = ZipperChain::build(&d).simulate(4).unwrap();
        assert!(check_simple(&curve).passed);
        let first = curve.points[1];
        let last = curve.points.len() - 1;
        curve.points[last] = first + Complex64::new(0.0, -1e-3);
        curve.points.push(first + Complex64::new(1e-3, 1e-3));
        curve.times.push(1.0);
        // close the loop through the early part
        curve.points.push(Complex64::new(first.re - 1.0, first.im));
        curve.times.push(1.0);
        assert!(!check_simple(&curve).passed);
    }
}

//! Driving functions sampled on the uniform capacity-time grid `t_k = k/n`.
//!
//! A [`SampledDriver`] stores the grid values together with the rule used to
//! extend them to all of `[0, 1]`: square-root interpolation on each cell
//! (the tilted-slit algorithm) or a left-continuous step function (vertical
//! slits).

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the pseudo-random generator recorded in output metadata.
pub const RNG_NAME: &str = "ChaCha8";

/// Seedable, splittable generator: one ChaCha8 stream per `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives an independent child seed, e.g. one per refinement level.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

// Stream ids, kept apart so generators sharing a seed never share variates.
const STREAM_BM: u64 = 1;
const STREAM_RW: u64 = 2;
const STREAM_PERTURB: u64 = 3;
const STREAM_BRIDGE: u64 = 4;

/// How grid values are extended between grid times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    /// `λ(t_k) + √n (λ(t_{k+1}) − λ(t_k)) √(t − t_k)` on `[t_k, t_{k+1}]`.
    SqrtInterp,
    /// `λ(t_k)` on `[t_k, t_{k+1})`.
    VerticalStep,
}

/// Record of how a driver's values were produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Brownian {
        kappa: f64,
        seed: u64,
        /// Seeds of successive bridge refinements applied after sampling.
        refinements: Vec<u64>,
    },
    RandomWalk {
        kappa: f64,
        seed: u64,
    },
    Sqrt {
        c: f64,
    },
    Zero,
    File {
        path: String,
    },
    Perturbed {
        base: Box<Provenance>,
        eps_max: f64,
        seed: u64,
    },
    Custom,
}

impl Provenance {
    fn label(&self) -> &'static str {
        match self {
            Provenance::Brownian { .. } => "brownian",
            Provenance::RandomWalk { .. } => "random-walk",
            Provenance::Sqrt { .. } => "sqrt",
            Provenance::Zero => "zero",
            Provenance::File { .. } => "file",
            Provenance::Perturbed { .. } => "perturbed",
            Provenance::Custom => "custom",
        }
    }
}

/// Driving-function values `λ(t_0), …, λ(t_n)` on `t_k = k/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledDriver {
    values: Vec<f64>,
    mode: Interpolation,
    provenance: Provenance,
}

impl SampledDriver {
    /// Builds a driver from `n + 1` finite grid values.
    pub fn new(values: Vec<f64>, mode: Interpolation, provenance: Provenance) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a driver needs at least 2 grid values, got {}",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "driver value at index {k} is not finite"
            )));
        }
        Ok(Self {
            values,
            mode,
            provenance,
        })
    }

    /// Number of steps `n`.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.n() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mode(&self) -> Interpolation {
        self.mode
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Same values, different interpolation rule.
    pub fn with_mode(&self, mode: Interpolation) -> Self {
        Self { mode, ..self.clone() }
    }

    /// Grid increment `λ(t_{k+1}) − λ(t_k)`.
    pub fn increment(&self, k: usize) -> f64 {
        self.values[k + 1] - self.values[k]
    }

    /// Grid time `t_k`.
    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.n() as f64
    }

    /// The interpolated driver `λⁿ(t)` for `t ∈ [0, 1]`.
    pub fn value_at(&self, t: f64) -> f64 {
        let n = self.n();
        let (k, s) = locate(n, t);
        match self.mode {
            Interpolation::VerticalStep => {
                if k < n && s >= self.dt() {
                    self.values[k + 1]
                } else {
                    self.values[k]
                }
            }
            Interpolation::SqrtInterp => self.values[k] + self.increment(k) * (s * n as f64).max(0.0).sqrt(),
        }
    }

    /// Grid values negated; the driver of the mirrored curve.
    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| -v).collect(),
            mode: self.mode,
            provenance: Provenance::Custom,
        }
    }

    /// One-line description used in output metadata.
    pub fn describe(&self) -> String {
        let mut s = format!(
            "driver={} n={} mode={}",
            self.provenance.label(),
            self.n(),
            mode_name(self.mode)
        );
        match &self.provenance {
            Provenance::Brownian {
                kappa,
                seed,
                refinements,
            } => {
                let _ = write!(s, " kappa={kappa} seed={seed} rng={RNG_NAME}");
                if !refinements.is_empty() {
                    let _ = write!(s, " refinements={refinements:?}");
                }
            }
            Provenance::RandomWalk { kappa, seed } => {
                let _ = write!(s, " kappa={kappa} seed={seed} rng={RNG_NAME}");
            }
            Provenance::Sqrt { c } => {
                let _ = write!(s, " c={c}");
            }
            Provenance::File { path } => {
                let _ = write!(s, " path={path}");
            }
            Provenance::Perturbed { eps_max, seed, .. } => {
                let _ = write!(s, " eps_max={eps_max} seed={seed} rng={RNG_NAME}");
            }
            Provenance::Zero | Provenance::Custom => {}
        }
        s
    }
}

pub(crate) fn mode_name(mode: Interpolation) -> &'static str {
    match mode {
        Interpolation::SqrtInterp => "sqrt-interp",
        Interpolation::VerticalStep => "vertical-step",
    }
}

/// Splits `t` into a cell index `k ≤ n − 1` and an offset `s = t − k/n ≥ 0`.
pub(crate) fn locate(n: usize, t: f64) -> (usize, f64) {
    let nf = n as f64;
    let mut k = (t * nf).floor().max(0.0) as usize;
    if k > n - 1 {
        k = n - 1;
    } else if k + 1 < n && (k + 1) as f64 / nf <= t {
        k += 1;
    }
    let s = (t - k as f64 / nf).max(0.0);
    (k, s)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(())
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "kappa must be finite and nonnegative, got {kappa}"
        )));
    }
    Ok(())
}

/// `√κ · B(t_k)` for a standard Brownian motion `B`.
pub fn sample_bm(kappa: f64, n: usize, seed: u64) -> Result<SampledDriver> {
    check_n(n)?;
    check_kappa(kappa)?;
    let mut rng = rng_for(seed, STREAM_BM);
    let sd = (kappa / n as f64).sqrt();
    let mut values = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    values.push(acc);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        acc += sd * z;
        values.push(acc);
    }
    SampledDriver::new(
        values,
        Interpolation::SqrtInterp,
        Provenance::Brownian {
            kappa,
            seed,
            refinements: Vec::new(),
        },
    )
}

/// Doubles the resolution of a Brownian driver by sampling each midpoint from
/// the Brownian-bridge law. Coarse values are kept bit-exact at even indices.
pub fn refine_bridge(d: &SampledDriver, seed: u64) -> Result<SampledDriver> {
    let (kappa, base_seed, refinements) = match d.provenance() {
        Provenance::Brownian {
            kappa,
            seed,
            refinements,
        } => (*kappa, *seed, refinements),
        other => return Err(Error::NotBrownian(other.label().to_string())),
    };
    let n = d.n();
    let mut rng = rng_for(seed, STREAM_BRIDGE);
    // midpoint given both ends: variance κ·(1/n)/4
    let sd = (kappa / n as f64).sqrt() / 2.0;
    let mut values = Vec::with_capacity(2 * n + 1);
    for w in d.values().windows(2) {
        let z: f64 = rng.sample(StandardNormal);
        values.push(w[0]);
        values.push(0.5 * (w[0] + w[1]) + sd * z);
    }
    values.push(d.values()[n]);
    let mut refinements = refinements.clone();
    refinements.push(seed);
    SampledDriver::new(
        values,
        d.mode(),
        Provenance::Brownian {
            kappa,
            seed: base_seed,
            refinements,
        },
    )
}

/// `√κ · S_k / √n` for a simple ±1 random walk `S`.
pub fn sample_rw(kappa: f64, n: usize, seed: u64) -> Result<SampledDriver> {
    check_n(n)?;
    check_kappa(kappa)?;
    let mut rng = rng_for(seed, STREAM_RW);
    let step = (kappa / n as f64).sqrt();
    let mut values = Vec::with_capacity(n + 1);
    let mut walk: i64 = 0;
    values.push(0.0);
    for _ in 0..n {
        walk += if rng.gen::<bool>() { 1 } else { -1 };
        values.push(walk as f64 * step);
    }
    SampledDriver::new(
        values,
        Interpolation::SqrtInterp,
        Provenance::RandomWalk { kappa, seed },
    )
}

/// `c √(t_k)`.
pub fn sqrt_driver(c: f64, n: usize) -> Result<SampledDriver> {
    check_n(n)?;
    if !c.is_finite() {
        return Err(Error::InvalidArgument(format!("c must be finite, got {c}")));
    }
    let values = (0..=n).map(|k| c * (k as f64 / n as f64).sqrt()).collect();
    SampledDriver::new(values, Interpolation::SqrtInterp, Provenance::Sqrt { c })
}

/// The zero driver; its trace is the vertical segment `2i√t`.
pub fn zero_driver(n: usize) -> Result<SampledDriver> {
    check_n(n)?;
    SampledDriver::new(vec![0.0; n + 1], Interpolation::SqrtInterp, Provenance::Zero)
}

/// Adds independent uniform noise in `[−eps_max, eps_max]` to every grid value.
pub fn perturb(d: &SampledDriver, eps_max: f64, seed: u64) -> Result<SampledDriver> {
    if !(eps_max.is_finite() && eps_max >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eps_max must be finite and nonnegative, got {eps_max}"
        )));
    }
    let values = if eps_max == 0.0 {
        d.values().to_vec()
    } else {
        let mut rng = rng_for(seed, STREAM_PERTURB);
        d.values()
            .iter()
            .map(|v| v + rng.gen_range(-eps_max..=eps_max))
            .collect()
    };
    SampledDriver::new(
        values,
        d.mode(),
        Provenance::Perturbed {
            base: Box::new(d.provenance().clone()),
            eps_max,
            seed,
        },
    )
}

/// Serializes grid values: the count `n` on the first line, then `n + 1`
/// values with 17 significant digits.
pub fn to_text(d: &SampledDriver) -> String {
    let mut out = String::with_capacity(26 * d.values().len() + 8);
    let _ = writeln!(out, "{}", d.n());
    for v in d.values() {
        let _ = writeln!(out, "{v:.16e}");
    }
    out
}

/// Parses the driver text format; `origin` only labels errors and provenance.
pub fn from_text(text: &str, mode: Interpolation, origin: &Path) -> Result<SampledDriver> {
    let bad = |reason: String| Error::MalformedDriver {
        path: origin.to_path_buf(),
        reason,
    };
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let n: usize = header
        .parse()
        .map_err(|_| bad(format!("first line must be the step count, got {header:?}")))?;
    if n == 0 {
        return Err(bad("step count must be at least 1".into()));
    }
    let mut values = Vec::with_capacity(n + 1);
    for (i, line) in lines.enumerate() {
        let v: f64 = line
            .parse()
            .map_err(|_| bad(format!("value {i} is not a number: {line:?}")))?;
        if !v.is_finite() {
            return Err(bad(format!("value {i} is not finite")));
        }
        values.push(v);
    }
    if values.len() != n + 1 {
        return Err(bad(format!("expected {} values, found {}", n + 1, values.len())));
    }
    SampledDriver::new(
        values,
        mode,
        Provenance::File {
            path: origin.display().to_string(),
        },
    )
}

pub fn save_driver(d: &SampledDriver, path: &Path) -> Result<()> {
    crate::io::write_atomic(path, to_text(d).as_bytes())
}

pub fn load_driver(path: &Path, mode: Interpolation) -> Result<SampledDriver> {
    let text = std::fs::read_to_string(path)?;
    from_text(&text, mode, path)
}

/// Grid oscillation `sup{|λ(t_i) − λ(t_j)| : |t_i − t_j| ≤ δ}`.
///
/// This is the grid approximation of the continuum oscillation; for the
/// square-root interpolation the two agree because each cell is monotone.
pub fn osc(d: &SampledDriver, delta: f64) -> f64 {
    let n = d.n();
    let window = ((delta * n as f64) + 1e-9).floor().max(0.0) as usize;
    let window = window.min(n);
    if window == 0 {
        return 0.0;
    }
    let vals = d.values();
    // sliding max/min over windows of window+1 consecutive grid values
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    for (i, &v) in vals.iter().enumerate() {
        while maxq.back().is_some_and(|&j| vals[j] <= v) {
            maxq.pop_back();
        }
        maxq.push_back(i);
        while minq.back().is_some_and(|&j| vals[j] >= v) {
            minq.pop_back();
        }
        minq.push_back(i);
        while maxq.front().is_some_and(|&j| j + window < i) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&j| j + window < i) {
            minq.pop_front();
        }
        best = best.max(vals[maxq[0]] - vals[minq[0]]);
    }
    best
}

/// The random-walk parameter `a ∈ (0, 1/2]` with `κ = 4(1−2a)²/(a(1−a))`.
pub fn kappa_to_a(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(0.5 * (1.0 - (kappa / (16.0 + kappa)).sqrt()))
}

/// Inverse of [`kappa_to_a`].
pub fn a_to_kappa(a: f64) -> f64 {
    let d = 1.0 - 2.0 * a;
    4.0 * d * d / (a * (1.0 - a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn bm_starts_at_zero_and_is_deterministic() {
        let d = sample_bm(8.0 / 3.0, 100, 1).unwrap();
        assert_eq!(d.values()[0], 0.0);
        assert_eq!(sample_bm(2.0, 4, 7).unwrap(), sample_bm(2.0, 4, 7).unwrap());
        assert_ne!(sample_bm(2.0, 4, 7).unwrap(), sample_bm(2.0, 4, 8).unwrap());
    }

    #[test]
    fn bm_endpoint_variance_is_kappa() {
        let samples: Vec<f64> = (0..10_000)
            .map(|s| sample_bm(2.0, 100, s).unwrap().values()[100])
            .collect();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64;
        assert!((var - 2.0).abs() < 0.1, "variance {var}");
    }

    #[test]
    fn bridge_keeps_coarse_values_exactly() {
        let d = sample_bm(2.0, 16, 3).unwrap();
        let r = refine_bridge(&d, 11).unwrap();
        assert_eq!(r.n(), 32);
        for (k, v) in d.values().iter().enumerate() {
            assert_eq!(r.values()[2 * k].to_bits(), v.to_bits());
        }
        assert_eq!(r, refine_bridge(&d, 11).unwrap());
    }

    #[test]
    fn bridge_midpoint_variance() {
        // κ = 1, n = 10: variance of midpoint minus neighbor mean is κ·(1/n)/4 = 1/40
        let mut devs = Vec::new();
        for s in 0..10_000u64 {
            let d = sample_bm(1.0, 10, s).unwrap();
            let r = refine_bridge(&d, s + 1_000_000).unwrap();
            let v = r.values();
            devs.push(v[5] - 0.5 * (v[4] + v[6]));
        }
        let var = devs.iter().map(|x| x * x).sum::<f64>() / devs.len() as f64;
        assert!((var - 1.0 / 40.0).abs() < 0.05 / 40.0, "variance {var}");
    }

    #[test]
    fn bridge_rejects_other_drivers() {
        let d = sqrt_driver(1.0, 4).unwrap();
        assert!(matches!(refine_bridge(&d, 1), Err(Error::NotBrownian(_))));
        let rw = sample_rw(2.0, 4, 1).unwrap();
        assert!(refine_bridge(&rw, 1).is_err());
    }

    #[test]
    fn random_walk_increments() {
        let d = sample_rw(4.0, 4, 9).unwrap();
        assert_eq!(d.values()[0], 0.0);
        for k in 0..4 {
            assert_eq!(d.increment(k).abs(), 1.0);
        }
        let d = sample_rw(8.0 / 3.0, 50, 2).unwrap();
        let step = (8.0f64 / 3.0 / 50.0).sqrt();
        for k in 0..50 {
            assert_relative_eq!(d.increment(k).abs(), step, max_relative = 1e-12);
        }
    }

    #[test]
    fn random_walk_endpoint_is_centered() {
        let n = 100;
        let samples: Vec<f64> = (0..10_000).map(|s| sample_rw(2.0, n, s).unwrap().values()[n]).collect();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        // Var(values[n]) = κ, so the Monte Carlo σ of the mean is √(2/10⁴)
        assert!(mean.abs() < 3.0 * (2.0f64 / 10_000.0).sqrt(), "mean {mean}");
    }

    #[test]
    fn sqrt_driver_values() {
        assert!(sqrt_driver(0.0, 8).unwrap().values().iter().all(|&v| v == 0.0));
        let d = sqrt_driver(1.0, 4).unwrap();
        let expected = [0.0, 0.5, 2f64.sqrt() / 2.0, 3f64.sqrt() / 2.0, 1.0];
        for (v, e) in d.values().iter().zip(expected) {
            assert_relative_eq!(*v, e, max_relative = 1e-15);
        }
        let m = sqrt_driver(-1.0, 4).unwrap();
        for (a, b) in d.values().iter().zip(m.values()) {
            assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn interpolated_values() {
        let d = SampledDriver::new(vec![0.0, 1.0, 1.0], Interpolation::SqrtInterp, Provenance::Custom).unwrap();
        assert_relative_eq!(d.value_at(0.125), (0.25f64).sqrt(), max_relative = 1e-15);
        assert_eq!(d.value_at(0.5), 1.0);
        assert_eq!(d.value_at(0.75), 1.0);
        let s = d.with_mode(Interpolation::VerticalStep);
        assert_eq!(s.value_at(0.25), 0.0);
        assert_eq!(s.value_at(0.5), 1.0);
        // the sqrt driver is reproduced exactly inside the first cell
        let c = sqrt_driver(2.0, 1).unwrap();
        assert_relative_eq!(c.value_at(0.3), 2.0 * 0.3f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let d = sample_bm(8.0 / 3.0, 33, 5).unwrap();
        let back = from_text(&to_text(&d), Interpolation::SqrtInterp, Path::new("mem")).unwrap();
        assert_eq!(back.values(), d.values());
    }

    #[test]
    fn malformed_text_is_rejected() {
        let p = Path::new("x");
        let m = Interpolation::SqrtInterp;
        assert!(from_text("", m, p).is_err());
        assert!(from_text("2\n0\n1\n", m, p).is_err());
        assert!(from_text("1\n0\nNaN\n", m, p).is_err());
        assert!(from_text("1\n0\ninf\n", m, p).is_err());
        assert!(from_text("one\n0\n1\n", m, p).is_err());
        assert!(from_text("1\n0\n1\n", m, p).is_ok());
    }

    #[test]
    fn perturbation_contract() {
        let d = sample_bm(2.0, 50, 4).unwrap();
        assert_eq!(perturb(&d, 0.0, 1).unwrap().values(), d.values());
        let p = perturb(&d, 0.01, 1).unwrap();
        for (a, b) in p.values().iter().zip(d.values()) {
            assert!((a - b).abs() <= 0.01);
        }
        assert!(perturb(&d, -1.0, 1).is_err());
    }

    #[test]
    fn oscillation_examples() {
        let flat = SampledDriver::new(vec![1.5; 9], Interpolation::SqrtInterp, Provenance::Custom).unwrap();
        assert_eq!(osc(&flat, 0.5), 0.0);
        assert_relative_eq!(osc(&sqrt_driver(-3.0, 64).unwrap(), 1.0), 3.0, max_relative = 1e-15);
        let d = sample_bm(2.0, 64, 8).unwrap();
        let mut prev = 0.0;
        for m in 1..=64 {
            let o = osc(&d, m as f64 / 64.0);
            assert!(o >= prev);
            prev = o;
        }
        // brute force over grid pairs
        for delta in [1.0f64 / 64.0, 0.1, 0.37] {
            let v = d.values();
            let w = (delta * 64.0 + 1e-9).floor() as usize;
            let mut best = 0.0f64;
            for i in 0..v.len() {
                for j in i..v.len().min(i + w + 1) {
                    best = best.max((v[i] - v[j]).abs());
                }
            }
            assert_eq!(osc(&d, delta), best);
        }
    }

    #[test]
    fn kappa_to_a_examples() {
        assert_eq!(kappa_to_a(0.0).unwrap(), 0.5);
        let a = kappa_to_a(8.0 / 3.0).unwrap();
        assert_relative_eq!(a, 0.5 - 7f64.sqrt() / 14.0, max_relative = 1e-14);
        assert!((a - 0.3110178).abs() < 1e-6);
        assert!(kappa_to_a(-1.0).is_err());
    }

    #[test]
    fn weak_holder_estimate_for_brownian_drivers() {
        // osc(λ; 1/m)·√m / √(log m) stays bounded across seeds and scales
        let n = 1024;
        let mut worst = 0.0f64;
        for seed in 0..20 {
            let d = sample_bm(2.0, n, seed).unwrap();
            for m in [4usize, 16, 64, 256, 1024] {
                let ratio = osc(&d, 1.0 / m as f64) * (m as f64).sqrt() / (m as f64).ln().sqrt();
                worst = worst.max(ratio);
            }
        }
        assert!(worst < 10.0, "weak Hölder constant {worst}");
    }

    proptest! {
        #[test]
        fn kappa_round_trip(kappa in 0.0f64..16.0) {
            let a = kappa_to_a(kappa).unwrap();
            prop_assert!(a > 0.0 && a <= 0.5);
            let back = a_to_kappa(a);
            prop_assert!((back - kappa).abs() <= 1e-12 * kappa.max(1e-300) + 1e-300);
        }

        #[test]
        fn locate_is_consistent(n in 1usize..500, t in 0.0f64..=1.0) {
            let (k, s) = locate(n, t);
            prop_assert!(k < n);
            prop_assert!(s >= 0.0 && s <= 1.0 / n as f64 + 1e-12);
        }
    }
}

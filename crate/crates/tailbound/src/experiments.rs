//! Synthetic comparison sweeps and the Monte Carlo validity oracle.
//!
//! Two generators reproduce the standard benchmark protocols: a homogeneous
//! t-sweep at M = 1 (Hoeffding given the arbitrary bottom range L = −1) and
//! heterogeneous random instances with Gaussian-magnitude ranges, uniform
//! means, and variance shrunk by a factor z. Everything is driven by a
//! counter-based seeded generator so records are bit-reproducible.
//!
//! The oracle samples from the extremal two-point law matching each
//! variable's mean, variance and ceiling exactly; a valid bound must
//! dominate the measured tail of that law.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::classical::{
    bennett_upper, bernstein_upper, hoeffding_upper, Method, RangeSpec, VariableSpec,
};
use crate::error::{Error, Result};
use crate::refined::refined_upper;

/// Clamped log-bounds of the four methods for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogBounds {
    pub hoeffding: f64,
    pub bennett: f64,
    pub bernstein: f64,
    pub refined: f64,
}

impl LogBounds {
    pub fn get(&self, method: Method) -> f64 {
        match method {
            Method::Hoeffding => self.hoeffding,
            Method::Bennett => self.bennett,
            Method::Bernstein => self.bernstein,
            Method::Refined => self.refined,
        }
    }
}

/// One synthetic instance's inputs plus the four methods' log-bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub instance_id: u64,
    pub n: u32,
    /// Variance-shrink factor of the draw (1 for homogeneous sweeps).
    pub z: f64,
    pub t: f64,
    /// Seed the instance was drawn from (0 for deterministic sweeps).
    pub seed: u64,
    pub log_bounds: LogBounds,
}

/// Extremal two-atom law matching a given mean, variance and ceiling: mass
/// p_hi = σ²/(σ²+s²) at μ+s and the rest at μ−σ²/s, with s the spread to
/// the ceiling. Among all laws with these moments and ceiling it maximizes
/// the upper-tail mass, which makes it the adversarial sampling choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPointDistribution {
    pub hi: f64,
    pub lo: f64,
    pub p_hi: f64,
}

impl TwoPointDistribution {
    pub fn mean(&self) -> f64 {
        self.p_hi * self.hi + (1.0 - self.p_hi) * self.lo
    }

    pub fn variance(&self) -> f64 {
        // p(1-p)(hi-lo)², the two-point identity; the through-the-mean form
        // cancels badly when one atom carries almost all the mass
        self.p_hi * (1.0 - self.p_hi) * (self.hi - self.lo) * (self.hi - self.lo)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        if rng.random::<f64>() < self.p_hi {
            self.hi
        } else {
            self.lo
        }
    }
}

/// Two-point law for a (μ, σ, M) triple; exact in mean and variance.
pub fn make_two_point(mu: f64, sigma: f64, ceiling: f64) -> Result<TwoPointDistribution> {
    if !mu.is_finite() || !sigma.is_finite() || !ceiling.is_finite() {
        return Err(Error::domain("two-point parameters must be finite"));
    }
    if !(sigma > 0.0) {
        return Err(Error::domain(format!("sigma must be positive, got {sigma}")));
    }
    if !(ceiling > mu) {
        return Err(Error::domain(format!(
            "ceiling {ceiling} must lie above the mean {mu}"
        )));
    }
    let s = ceiling - mu;
    let sigma2 = sigma * sigma;
    Ok(TwoPointDistribution {
        hi: ceiling,
        lo: mu - sigma2 / s,
        p_hi: sigma2 / (sigma2 + s * s),
    })
}

/// splitmix64 mix step; stable across platforms.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Per-trial seed derivation: trials stay independent and may be evaluated
/// in any order or in parallel without sharing generator state.
pub fn trial_seed(seed: u64, instance_id: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ instance_id)
}

fn trial_rng(seed: u64, instance_id: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, instance_id))
}

/// All four log-bounds for one instance: Hoeffding from the two-sided
/// ranges, the variance-based methods from the ceiling specs.
pub fn instance_log_bounds(
    vars: &[VariableSpec],
    ranges: &[RangeSpec],
    t: f64,
) -> Result<LogBounds> {
    Ok(LogBounds {
        hoeffding: hoeffding_upper(ranges, t)?.log_probability,
        bennett: bennett_upper(vars, t)?.log_probability,
        bernstein: bernstein_upper(vars, t)?.log_probability,
        refined: refined_upper(vars, t)?.log_probability,
    })
}

/// Evenly spaced deviations strictly inside (0, 1−μ), offset by half a step
/// from both endpoints.
pub fn default_t_grid(mu: f64, points: usize) -> Vec<f64> {
    let span = 1.0 - mu;
    let step = span / points as f64;
    (0..points).map(|k| (k as f64 + 0.5) * step).collect()
}

/// Homogeneous comparison sweep: n = 1, ceiling locked at M = 1, Hoeffding
/// given the arbitrary bottom range L = −1. Requires σ ∈ (0, 1] (so the
/// elementary inequality σ ≤ (M−L)/2 holds) and μ ∈ (−1, 1). Grid points
/// outside (0, 1−μ) become per-point errors.
pub fn homogeneous_sweep(
    mu: f64,
    sigma: f64,
    t_grid: &[f64],
) -> Result<Vec<(f64, Result<ExperimentRecord>)>> {
    if !(sigma > 0.0) || sigma > 1.0 {
        return Err(Error::domain(format!(
            "sigma must lie in (0, 1] so that sigma <= (M-L)/2, got {sigma}"
        )));
    }
    if !(mu > -1.0) || !(mu < 1.0) {
        return Err(Error::domain(format!("mu must lie in (-1, 1), got {mu}")));
    }
    let vars = [VariableSpec::ceiling(mu, sigma, 1.0)?];
    let ranges = [RangeSpec::new(-1.0, 1.0)?];
    let span = 1.0 - mu;
    Ok(t_grid
        .iter()
        .enumerate()
        .map(|(idx, &t)| {
            let rec = if t > 0.0 && t < span {
                instance_log_bounds(&vars, &ranges, t).map(|log_bounds| ExperimentRecord {
                    instance_id: idx as u64,
                    n: 1,
                    z: 1.0,
                    t,
                    seed: 0,
                    log_bounds,
                })
            } else {
                Err(Error::domain(format!(
                    "grid point {t} outside (0, {span})"
                )))
            };
            (t, rec)
        })
        .collect())
}

const REJECTION_CAP: u32 = 1000;

struct DrawnInstance {
    vars: Vec<VariableSpec>,
    ranges: Vec<RangeSpec>,
    t: f64,
}

/// One heterogeneous instance: M_i = |N(0,1)|, L_i = −|N(0,1)|,
/// μ_i ~ U[L_i, M_i], σ_i ~ U(0, (M_i−L_i)/(2z)], t = u·s̄ with u ~ U(0,1).
/// `feasible` additionally caps σ_i² at (M_i−μ_i)(μ_i−L_i), the largest
/// variance any law supported on [L_i, M_i] with mean μ_i can have; the
/// two-point oracle then respects the floor, which Hoeffding's hypothesis
/// needs. Measure-zero degenerate draws are rejected and redrawn.
fn draw_instance(rng: &mut ChaCha8Rng, n: u32, z: f64, feasible: bool) -> Result<DrawnInstance> {
    let mut vars = Vec::with_capacity(n as usize);
    let mut ranges = Vec::with_capacity(n as usize);
    let mut rejections = 0u32;
    let reject = |rejections: &mut u32| -> Result<()> {
        *rejections += 1;
        if *rejections > REJECTION_CAP {
            return Err(Error::degenerate(
                "exceeded the rejection cap while drawing an instance",
            ));
        }
        Ok(())
    };
    while vars.len() < n as usize {
        let m: f64 = rng.sample::<f64, _>(StandardNormal).abs();
        let l: f64 = -rng.sample::<f64, _>(StandardNormal).abs();
        let mu = rng.random_range(l..=m);
        if m - l == 0.0 || m - mu == 0.0 {
            reject(&mut rejections)?;
            continue;
        }
        let mut sigma_cap = (m - l) / (2.0 * z);
        if feasible {
            let feasibility = ((m - mu) * (mu - l)).sqrt();
            if feasibility == 0.0 {
                reject(&mut rejections)?;
                continue;
            }
            sigma_cap = sigma_cap.min(feasibility);
        }
        let sigma = rng.random::<f64>() * sigma_cap;
        if sigma == 0.0 {
            reject(&mut rejections)?;
            continue;
        }
        vars.push(VariableSpec::ceiling(mu, sigma, m)?);
        ranges.push(RangeSpec::new(l, m)?);
    }
    let s_bar = vars.iter().map(VariableSpec::spread).sum::<f64>() / n as f64;
    let t = loop {
        let u = rng.random::<f64>();
        if u > 0.0 {
            break u * s_bar;
        }
        reject(&mut rejections)?;
    };
    Ok(DrawnInstance { vars, ranges, t })
}

/// Heterogeneous random-instance comparison. Each trial draws its own
/// instance from a seed derived as trial_seed(seed, instance_id), computes
/// all four log-bounds (the variance-based methods ignore the L_i values),
/// and is bit-reproducible for a fixed seed.
pub fn heterogeneous_trials(
    n: u32,
    z: f64,
    trials: u32,
    seed: u64,
) -> Result<Vec<ExperimentRecord>> {
    if n == 0 || trials == 0 {
        return Err(Error::domain("n and trials must be at least 1"));
    }
    if !(z >= 1.0) {
        return Err(Error::domain(format!(
            "variance-shrink factor z must be >= 1, got {z}"
        )));
    }
    (0..trials as u64)
        .map(|id| {
            let mut rng = trial_rng(seed, id);
            let inst = draw_instance(&mut rng, n, z, false)?;
            let log_bounds = instance_log_bounds(&inst.vars, &inst.ranges, inst.t)?;
            Ok(ExperimentRecord {
                instance_id: id,
                n,
                z,
                t: inst.t,
                seed: trial_seed(seed, id),
                log_bounds,
            })
        })
        .collect()
}

/// A heterogeneous instance whose (L, M, μ, σ) tuples are feasible, i.e.
/// realizable by some law supported on [L_i, M_i]; used by the validity
/// harness so that every method's hypotheses hold for the sampled laws.
pub struct SyntheticInstance {
    pub vars: Vec<VariableSpec>,
    pub ranges: Vec<RangeSpec>,
    pub t: f64,
    pub n: u32,
    pub z: f64,
}

pub fn feasible_instance(seed: u64, instance_id: u64, n_max: u32, z: f64) -> Result<SyntheticInstance> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let mut rng = trial_rng(seed, instance_id);
    let n = rng.random_range(1..=n_max);
    let inst = draw_instance(&mut rng, n, z, true)?;
    Ok(SyntheticInstance {
        vars: inst.vars,
        ranges: inst.ranges,
        t: inst.t,
        n,
        z,
    })
}

/// Monte Carlo tail estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Estimates Pr((1/n)·Σ(X_i − μ_i) ≥ t) with every X_i drawn from the
/// extremal two-point law of its spec. Deterministic for a fixed seed.
pub fn monte_carlo_tail(
    vars: &[VariableSpec],
    t: f64,
    trials: u32,
    seed: u64,
) -> Result<TailEstimate> {
    if trials < 1000 {
        return Err(Error::domain(format!(
            "need at least 1000 trials for a usable tail estimate, got {trials}"
        )));
    }
    if vars.is_empty() {
        return Err(Error::domain("need at least one variable"));
    }
    let laws: Vec<TwoPointDistribution> = vars
        .iter()
        .map(|v| {
            v.validate()?;
            if v.bound_side != crate::classical::BoundSide::Ceiling {
                return Err(Error::domain("monte_carlo_tail expects ceiling-sided specs"));
            }
            make_two_point(v.mu, v.sigma, v.bound_value)
        })
        .collect::<Result<_>>()?;
    let n = vars.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    let mut hits = 0u64;
    for _ in 0..trials {
        let dev: f64 = laws
            .iter()
            .zip(vars)
            .map(|(law, v)| law.sample(&mut rng) - v.mu)
            .sum();
        if dev / n >= t {
            hits += 1;
        }
    }
    let estimate = hits as f64 / trials as f64;
    Ok(TailEstimate {
        estimate,
        std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
    })
}

//! Portfolio underperformance bounds and optimal budget allocation.
//!
//! An investment is a payoff variable with known floor L_i, mean μ_i and
//! deviation σ_i. Two questions are answered without any parametric model:
//!
//! * how likely is a *fixed* portfolio to pay out at most a threshold τ
//!   ([`underperformance_bound`], any of the four methods);
//! * how should a unit budget be split so that the refined bound Φ on
//!   underperforming a target return τ is smallest ([`allocate`]): each
//!   per-investment multiplier λ_i is minimized independently in closed
//!   form and the weights are α_i = λ_i / Σλ_j.

use serde::{Deserialize, Serialize};

use crate::classical::{
    hoeffding_upper, lower_tail, reflect_ranges, BoundResult, Method, RangeSpec, VariableSpec,
};
use crate::error::{Error, Result};
use crate::refined::{lambda_star_single, mgf_majorant_log, refined_lower, refined_lower_polished};

/// A named investment: expected payoff, payoff deviation, and payoff floor,
/// all in the same currency unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Investment {
    pub name: String,
    pub mu: f64,
    pub sigma: f64,
    pub floor: f64,
}

impl Investment {
    pub fn new(name: impl Into<String>, mu: f64, sigma: f64, floor: f64) -> Result<Self> {
        let inv = Investment {
            name: name.into(),
            mu,
            sigma,
            floor,
        };
        inv.validate()?;
        Ok(inv)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || !self.sigma.is_finite() || !self.floor.is_finite() {
            return Err(Error::domain(format!(
                "investment '{}' must have finite mu, sigma, floor",
                self.name
            )));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::domain(format!(
                "investment '{}' needs sigma > 0, got {}",
                self.name, self.sigma
            )));
        }
        if self.floor > self.mu {
            return Err(Error::domain(format!(
                "investment '{}' has floor {} above its mean {}",
                self.name, self.floor, self.mu
            )));
        }
        Ok(())
    }

    /// Floor-sided variable spec for the tail machinery.
    pub fn to_variable_spec(&self) -> VariableSpec {
        VariableSpec {
            mu: self.mu,
            sigma: self.sigma,
            bound_value: self.floor,
            bound_side: crate::classical::BoundSide::Floor,
        }
    }

    /// Spread above the floor, s_i = μ_i − L_i.
    pub fn spread(&self) -> f64 {
        self.mu - self.floor
    }
}

/// Most-optimistic two-sided range for Hoeffding: the elementary inequality
/// σ ≤ (M−L)/2 caps the ceiling at M̂ = max(L + 2σ, μ). Tightens Hoeffding
/// as far as the known moments allow, at the price of an extra assumption.
pub fn imputed_range(inv: &Investment) -> RangeSpec {
    RangeSpec {
        lo: inv.floor,
        hi: (inv.floor + 2.0 * inv.sigma).max(inv.mu),
    }
}

/// [`imputed_range`] for a bare one-sided spec: the missing side gets the
/// most-optimistic value, so a floor L gains ceiling max(L + 2σ, μ) and a
/// ceiling M gains floor min(M − 2σ, μ).
pub fn imputed_range_for_spec(v: &VariableSpec) -> Result<RangeSpec> {
    v.validate()?;
    Ok(match v.bound_side {
        crate::classical::BoundSide::Floor => RangeSpec {
            lo: v.bound_value,
            hi: (v.bound_value + 2.0 * v.sigma).max(v.mu),
        },
        crate::classical::BoundSide::Ceiling => RangeSpec {
            lo: (v.bound_value - 2.0 * v.sigma).min(v.mu),
            hi: v.bound_value,
        },
    })
}

/// Optimal allocation output: weights summing to one, the per-investment
/// multipliers they came from, and the bound Φ on underperforming τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub tau: f64,
    pub weights: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub phi_bound: f64,
}

fn validate_portfolio(investments: &[Investment]) -> Result<()> {
    if investments.is_empty() {
        return Err(Error::domain("need at least one investment"));
    }
    for inv in investments {
        inv.validate()?;
    }
    Ok(())
}

/// Bound on Pr(Σ X_i ≤ total_threshold) for a fixed portfolio holding every
/// investment, by the chosen method. The average-payoff deviation is
/// t = (Σμ_i − total_threshold)/n; Hoeffding imputes most-optimistic
/// ceilings, the variance-based methods use floors directly.
pub fn underperformance_bound(
    investments: &[Investment],
    total_threshold: f64,
    method: Method,
) -> Result<BoundResult> {
    underperformance_bound_impl(investments, total_threshold, method, false)
}

/// [`underperformance_bound`] with the refined method's λ polished by a 1-D
/// minimization; identical for the other methods.
pub fn underperformance_bound_polished(
    investments: &[Investment],
    total_threshold: f64,
    method: Method,
) -> Result<BoundResult> {
    underperformance_bound_impl(investments, total_threshold, method, true)
}

fn underperformance_bound_impl(
    investments: &[Investment],
    total_threshold: f64,
    method: Method,
    polish: bool,
) -> Result<BoundResult> {
    validate_portfolio(investments)?;
    if !total_threshold.is_finite() {
        return Err(Error::domain("total threshold must be finite"));
    }
    let n = investments.len() as f64;
    let mu_total: f64 = investments.iter().map(|i| i.mu).sum();
    let t = (mu_total - total_threshold) / n;
    let vars: Vec<VariableSpec> = investments.iter().map(Investment::to_variable_spec).collect();

    match method {
        Method::Hoeffding => {
            if t <= 0.0 {
                return Err(Error::domain(format!(
                    "threshold must lie below the expected total; admissible interval \
                     (-inf, {mu_total})"
                )));
            }
            let ranges: Vec<RangeSpec> = investments.iter().map(imputed_range).collect();
            hoeffding_upper(&reflect_ranges(&ranges), t)
        }
        Method::Bennett | Method::Bernstein => {
            if t <= 0.0 {
                return Err(Error::domain(format!(
                    "threshold must lie below the expected total; admissible interval \
                     (-inf, {mu_total})"
                )));
            }
            lower_tail(method, &vars, t)
        }
        Method::Refined => {
            let s_bar: f64 = investments.iter().map(Investment::spread).sum::<f64>() / n;
            let lo = mu_total - n * s_bar;
            if t <= 0.0 || t >= s_bar {
                return Err(Error::domain(format!(
                    "threshold out of the refined bound's domain; admissible interval \
                     ({lo}, {mu_total})"
                )));
            }
            if polish {
                refined_lower_polished(&vars, t)
            } else {
                refined_lower(&vars, t)
            }
        }
    }
}

/// Closed-form multiplier for one investment at return target τ ∈ (L_i, μ_i):
/// identical to [`lambda_star_single`] with s_i = μ_i − L_i, t_i = μ_i − τ.
pub fn allocation_lambda(inv: &Investment, tau: f64) -> Result<f64> {
    inv.validate()?;
    if !(tau > inv.floor) || !(tau < inv.mu) {
        return Err(Error::domain(format!(
            "target {tau} outside ({}, {}) for investment '{}'",
            inv.floor, inv.mu, inv.name
        )));
    }
    lambda_star_single(inv.spread(), inv.sigma * inv.sigma, inv.mu - tau)
}

/// Open interval of return targets every investment admits:
/// (max_i L_i, min_i μ_i).
pub fn admissible_tau_interval(investments: &[Investment]) -> Result<(f64, f64)> {
    validate_portfolio(investments)?;
    let lo = investments
        .iter()
        .map(|i| i.floor)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = investments
        .iter()
        .map(|i| i.mu)
        .fold(f64::INFINITY, f64::min);
    Ok((lo, hi))
}

/// Optimal budget split for target return τ: per-investment multipliers
/// λ_i from [`allocation_lambda`], weights α_i = λ_i/Σλ_j, and the bound
///
/// ```text
/// Φ ≤ Π_i e^{−λ_i(μ_i−τ)}·[(σ_i²/s_i²)(e^{λ_i s_i} − 1 − λ_i s_i) + 1]
/// ```
///
/// accumulated in log space.
pub fn allocate(investments: &[Investment], tau: f64) -> Result<AllocationResult> {
    let (lo, hi) = admissible_tau_interval(investments)?;
    if !(tau > lo) || !(tau < hi) {
        return Err(Error::domain(format!(
            "target tau must lie in ({lo}, {hi}), got {tau}"
        )));
    }
    let lambdas: Vec<f64> = investments
        .iter()
        .map(|inv| allocation_lambda(inv, tau))
        .collect::<Result<_>>()?;
    let total: f64 = lambdas.iter().sum();
    if !(total > 0.0) {
        return Err(Error::degenerate(
            "all multipliers are zero; no meaningful allocation exists at this target",
        ));
    }
    let weights: Vec<f64> = lambdas.iter().map(|l| l / total).collect();
    let phi_log: f64 = investments
        .iter()
        .zip(&lambdas)
        .map(|(inv, &l)| {
            -l * (inv.mu - tau) + mgf_majorant_log(inv.spread(), inv.sigma * inv.sigma, l)
        })
        .sum();
    Ok(AllocationResult {
        tau,
        weights,
        lambdas,
        phi_bound: phi_log.exp().min(1.0),
    })
}

/// [`allocate`] across a τ grid; invalid grid points yield per-point errors
/// instead of aborting the sweep.
pub fn allocation_sweep(
    investments: &[Investment],
    tau_grid: &[f64],
) -> Vec<(f64, Result<AllocationResult>)> {
    tau_grid
        .iter()
        .map(|&tau| (tau, allocate(investments, tau)))
        .collect()
}

/// Evenly spaced τ grid strictly inside the admissible interval, offset by
/// half a step from each endpoint.
pub fn tau_grid(investments: &[Investment], points: usize) -> Result<Vec<f64>> {
    let (lo, hi) = admissible_tau_interval(investments)?;
    if !(hi > lo) {
        return Err(Error::domain(format!(
            "admissible tau interval ({lo}, {hi}) is empty"
        )));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain(
            "tau grid needs finite floors; supply explicit tau values instead",
        ));
    }
    let step = (hi - lo) / points as f64;
    Ok((0..points).map(|k| lo + (k as f64 + 0.5) * step).collect())
}

/// Target return whose optimal allocation deviates from its own expected
/// return by exactly t, i.e. the τ solving Σα_i(τ)·μ_i − t = τ. Solved by
/// bisection; errors if no such τ exists inside the admissible interval.
/// t must lie in (0, min_i(μ_i − L_i)); that range is necessary but not
/// sufficient, since the attainable deviations depend on the weights.
pub fn tau_for_deviation(investments: &[Investment], t: f64) -> Result<f64> {
    validate_portfolio(investments)?;
    let max_spread_floor = investments
        .iter()
        .map(Investment::spread)
        .fold(f64::INFINITY, f64::min);
    if !(t > 0.0) || !(t < max_spread_floor) {
        return Err(Error::domain(format!(
            "deviation t must lie in (0, {max_spread_floor}), got {t}"
        )));
    }
    let (lo, hi) = admissible_tau_interval(investments)?;
    let pad = 1e-9 * (hi - lo);
    let excess = |tau: f64| -> Result<f64> {
        let alloc = allocate(investments, tau)?;
        let expected: f64 = alloc
            .weights
            .iter()
            .zip(investments)
            .map(|(a, inv)| a * inv.mu)
            .sum();
        Ok(expected - t - tau)
    };
    let mut a = lo + pad;
    let mut b = hi - pad;
    let fa = excess(a)?;
    let fb = excess(b)?;
    if fa < 0.0 || fb > 0.0 {
        return Err(Error::domain(format!(
            "no target return inside ({lo}, {hi}) deviates by exactly {t}; pick tau directly"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if excess(mid)? >= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= 1e-13 * (hi - lo) {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

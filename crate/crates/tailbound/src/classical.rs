//! Classical upper-tail bounds (Hoeffding, generalized Bennett, Bernstein)
//! and the reflection machinery that turns them into lower-tail bounds.
//!
//! All bounds control Pr((1/n)·ΣX_i − (1/n)·ΣE[X_i] ≥ t):
//!
//! * Hoeffding: exp(−2n²t² / Σ(M_i−L_i)²) from two-sided ranges only;
//! * Bennett:   exp(−n·(v/s²)·h(ts/v)) with h(x) = (1+x)ln(1+x) − x,
//!   s = max_i (M_i−μ_i), v = (1/n)·Σσ_i²;
//! * Bernstein: same with g(x) = 3x²/(2x+6) in place of h; h ≥ g on x ≥ 0
//!   so Bennett is never looser.
//!
//! Lower tails are never re-derived: [`reflect`] maps X_i ↦ −X_i (floors
//! become ceilings, tails swap) and [`lower_tail`] dispatches through it.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which side of the support a [`VariableSpec`]'s bound constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    /// X_i ≤ bound_value almost surely.
    Ceiling,
    /// X_i ≥ bound_value almost surely.
    Floor,
}

/// Summary of one random variable: mean, standard deviation, and a one-sided
/// almost-sure bound on its support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub mu: f64,
    pub sigma: f64,
    pub bound_value: f64,
    pub bound_side: BoundSide,
}

impl VariableSpec {
    pub fn new(mu: f64, sigma: f64, bound_value: f64, bound_side: BoundSide) -> Result<Self> {
        let v = VariableSpec {
            mu,
            sigma,
            bound_value,
            bound_side,
        };
        v.validate()?;
        Ok(v)
    }

    /// Ceiling-sided spec: X ≤ m almost surely.
    pub fn ceiling(mu: f64, sigma: f64, m: f64) -> Result<Self> {
        Self::new(mu, sigma, m, BoundSide::Ceiling)
    }

    /// Floor-sided spec: X ≥ l almost surely.
    pub fn floor(mu: f64, sigma: f64, l: f64) -> Result<Self> {
        Self::new(mu, sigma, l, BoundSide::Floor)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || !self.sigma.is_finite() || !self.bound_value.is_finite() {
            return Err(Error::domain(format!(
                "variable spec must be finite: mu={}, sigma={}, bound={}",
                self.mu, self.sigma, self.bound_value
            )));
        }
        if self.sigma < 0.0 {
            return Err(Error::domain(format!(
                "sigma must be nonnegative, got {}",
                self.sigma
            )));
        }
        match self.bound_side {
            BoundSide::Ceiling if self.bound_value < self.mu => Err(Error::domain(format!(
                "ceiling {} lies below the mean {}",
                self.bound_value, self.mu
            ))),
            BoundSide::Floor if self.bound_value > self.mu => Err(Error::domain(format!(
                "floor {} lies above the mean {}",
                self.bound_value, self.mu
            ))),
            _ => Ok(()),
        }
    }

    /// Distance from the mean to the one-sided bound (s_i = |bound − μ|).
    pub fn spread(&self) -> f64 {
        (self.bound_value - self.mu).abs()
    }
}

/// Two-sided support bound L ≤ X ≤ M, as Hoeffding's inequality requires.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeSpec {
    pub lo: f64,
    pub hi: f64,
}

impl RangeSpec {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::domain(format!(
                "range must be finite with lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(RangeSpec { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Tail-bound method identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Hoeffding,
    Bennett,
    Bernstein,
    Refined,
}

impl Method {
    /// All methods, in the crate's canonical reporting order.
    pub const ALL: [Method; 4] = [
        Method::Refined,
        Method::Bennett,
        Method::Bernstein,
        Method::Hoeffding,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Hoeffding => "hoeffding",
            Method::Bennett => "bennett",
            Method::Bernstein => "bernstein",
            Method::Refined => "refined",
        };
        f.write_str(s)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hoeffding" => Ok(Method::Hoeffding),
            "bennett" => Ok(Method::Bennett),
            "bernstein" => Ok(Method::Bernstein),
            "refined" => Ok(Method::Refined),
            other => Err(Error::domain(format!(
                "unknown method '{other}' (expected hoeffding, bennett, bernstein or refined)"
            ))),
        }
    }
}

/// A computed tail bound.
///
/// `raw_log_bound` is the bound exactly as the formula produced it (it can
/// exceed 0 for a poor multiplier choice and still be a valid bound);
/// `log_probability` and `probability` are clamped to ≤ 0 and [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub method: Method,
    pub log_probability: f64,
    pub probability: f64,
    pub raw_log_bound: f64,
    /// Multiplier λ used inside the Chernoff argument; absent for Hoeffding.
    pub lambda: Option<f64>,
    /// Set when the inputs made the formula indeterminate and the true
    /// deviation probability is 0 (all-degenerate ranges or variances).
    pub degenerate: bool,
}

impl BoundResult {
    pub fn from_raw(method: Method, raw_log_bound: f64, lambda: Option<f64>) -> Self {
        BoundResult {
            method,
            log_probability: raw_log_bound.min(0.0),
            probability: raw_log_bound.exp().min(1.0),
            raw_log_bound,
            lambda,
            degenerate: false,
        }
    }

    /// Flagged zero-probability result for degenerate inputs; no −∞ is
    /// fabricated silently.
    pub fn zero_probability(method: Method) -> Self {
        BoundResult {
            method,
            log_probability: f64::NEG_INFINITY,
            probability: 0.0,
            raw_log_bound: f64::NEG_INFINITY,
            lambda: None,
            degenerate: true,
        }
    }
}

/// Bennett's rate function h(x) = (1+x)·ln(1+x) − x for x ≥ 0.
///
/// Evaluated through ln_1p, with the series x²/2 − x³/6 + x⁴/12 − x⁵/20
/// below x = 1e-4 where the direct form cancels.
pub fn bennett_h(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 1e-4 {
        x * x / 2.0 * (1.0 - x / 3.0 + x * x / 6.0 - x * x * x / 10.0)
    } else {
        (1.0 + x) * x.ln_1p() - x
    }
}

/// Bernstein's rate function g(x) = 3x²/(2x+6); g ≤ h on x ≥ 0.
pub fn bernstein_g(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    3.0 * x * x / (2.0 * x + 6.0)
}

fn validate_t(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain(format!(
            "deviation t must be finite and nonnegative, got {t}"
        )));
    }
    Ok(())
}

fn validate_side(vars: &[VariableSpec], side: BoundSide) -> Result<()> {
    if vars.is_empty() {
        return Err(Error::domain("need at least one variable"));
    }
    for v in vars {
        v.validate()?;
        if v.bound_side != side {
            return Err(Error::domain(format!(
                "expected every variable to be {side:?}-sided; reflect() the specs first"
            )));
        }
    }
    Ok(())
}

/// Hoeffding's bound on the upper tail of the average.
pub fn hoeffding_upper(ranges: &[RangeSpec], t: f64) -> Result<BoundResult> {
    if ranges.is_empty() {
        return Err(Error::domain("need at least one range"));
    }
    for r in ranges {
        RangeSpec::new(r.lo, r.hi)?;
    }
    validate_t(t)?;
    if t == 0.0 {
        return Ok(BoundResult::from_raw(Method::Hoeffding, 0.0, None));
    }
    let denom: f64 = ranges.iter().map(|r| r.width() * r.width()).sum();
    if denom == 0.0 {
        return Ok(BoundResult::zero_probability(Method::Hoeffding));
    }
    let nt = ranges.len() as f64 * t;
    Ok(BoundResult::from_raw(
        Method::Hoeffding,
        -2.0 * nt * nt / denom,
        None,
    ))
}

/// Shared shape of the Bennett and Bernstein bounds:
/// exp(−n·(v/s²)·rate(ts/v)) with s = max spread, v = mean variance.
fn variance_bound(
    method: Method,
    rate: impl Fn(f64) -> f64,
    lambda_at: impl Fn(f64, f64, f64) -> f64,
    vars: &[VariableSpec],
    t: f64,
) -> Result<BoundResult> {
    validate_side(vars, BoundSide::Ceiling)?;
    validate_t(t)?;
    if t == 0.0 {
        return Ok(BoundResult::from_raw(method, 0.0, None));
    }
    let n = vars.len() as f64;
    let s = vars.iter().map(VariableSpec::spread).fold(0.0, f64::max);
    let v = vars.iter().map(|v| v.sigma * v.sigma).sum::<f64>() / n;
    if s == 0.0 || v == 0.0 {
        return Ok(BoundResult::zero_probability(method));
    }
    let raw = -n * (v / (s * s)) * rate(t * s / v);
    Ok(BoundResult::from_raw(method, raw, Some(lambda_at(t, s, v))))
}

/// Generalized Bennett bound from per-variable means, variances and ceilings.
pub fn bennett_upper(vars: &[VariableSpec], t: f64) -> Result<BoundResult> {
    // the optimizing multiplier is ln(1 + ts/v)/s
    variance_bound(
        Method::Bennett,
        bennett_h,
        |t, s, v| (t * s / v).ln_1p() / s,
        vars,
        t,
    )
}

/// Bernstein bound; same inputs as [`bennett_upper`] with the weaker rate g.
pub fn bernstein_upper(vars: &[VariableSpec], t: f64) -> Result<BoundResult> {
    variance_bound(
        Method::Bernstein,
        bernstein_g,
        |t, s, v| t / (v + s * t / 3.0),
        vars,
        t,
    )
}

/// X_i ↦ −X_i: negates means and bounds, swaps floors and ceilings.
/// Involutive; the upper tail of the reflected variables is the lower tail
/// of the originals.
pub fn reflect(vars: &[VariableSpec]) -> Vec<VariableSpec> {
    vars.iter()
        .map(|v| VariableSpec {
            mu: -v.mu,
            sigma: v.sigma,
            bound_value: -v.bound_value,
            bound_side: match v.bound_side {
                BoundSide::Ceiling => BoundSide::Floor,
                BoundSide::Floor => BoundSide::Ceiling,
            },
        })
        .collect()
}

/// Range counterpart of [`reflect`]: [L, M] ↦ [−M, −L].
pub fn reflect_ranges(ranges: &[RangeSpec]) -> Vec<RangeSpec> {
    ranges
        .iter()
        .map(|r| RangeSpec {
            lo: -r.hi,
            hi: -r.lo,
        })
        .collect()
}

/// Lower-tail bound Pr((1/n)·ΣX_i − (1/n)·ΣE[X_i] ≤ −t) for floor-sided
/// specs, computed as the chosen upper-tail bound on the reflected variables.
///
/// Hoeffding is not dispatched here: it needs two-sided ranges, which a
/// one-sided spec cannot provide without an imputation policy (see the
/// portfolio module's most-optimistic ceiling).
pub fn lower_tail(method: Method, vars: &[VariableSpec], t: f64) -> Result<BoundResult> {
    validate_side(vars, BoundSide::Floor)?;
    let reflected = reflect(vars);
    match method {
        Method::Bennett => bennett_upper(&reflected, t),
        Method::Bernstein => bernstein_upper(&reflected, t),
        Method::Refined => crate::refined::refined_upper(&reflected, t),
        Method::Hoeffding => Err(Error::domain(
            "hoeffding needs two-sided ranges; impute a ceiling and use hoeffding_upper \
             on reflected ranges",
        )),
    }
}

//! Principal branch of Lambert's W function.
//!
//! W(x) is the inverse of w ↦ w·e^w, i.e. W(x)·e^{W(x)} = x, or equivalently
//! W = ln(x) − ln(W). Two evaluation forms are provided:
//!
//! * [`lambert_w`] solves w·e^w = x directly for x ≥ 0;
//! * [`lambert_w_exp`] evaluates W(exp(x)) by solving w + ln(w) = x, which
//!   never materializes exp(x) and therefore works for exponents far beyond
//!   the overflow threshold.
//!
//! Both use a Halley-type update and stop when the defining-equation residual
//! drops below a relative tolerance. If an update step ever produces a
//! non-finite or out-of-range iterate, evaluation falls back to bisection on
//! the defining equation, so the functions are total on their domains.

use crate::error::{Error, Result};

/// Iteration controls for the W evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WConfig {
    /// Residual tolerance: relative to x for the direct form, to
    /// max(|x|, 1) for the exponentiated form.
    pub relative_tolerance: f64,
    /// Iteration cap for the Halley updates and the bisection fallback.
    pub max_iterations: u32,
}

impl Default for WConfig {
    fn default() -> Self {
        WConfig {
            relative_tolerance: 1e-12,
            max_iterations: 100,
        }
    }
}

impl WConfig {
    pub fn new(relative_tolerance: f64, max_iterations: u32) -> Result<Self> {
        if !(relative_tolerance > 0.0) || !relative_tolerance.is_finite() {
            return Err(Error::domain(format!(
                "relative_tolerance must be a positive finite number, got {relative_tolerance}"
            )));
        }
        if max_iterations == 0 {
            return Err(Error::domain("max_iterations must be at least 1"));
        }
        Ok(WConfig {
            relative_tolerance,
            max_iterations,
        })
    }
}

/// Below this exponent W(e^x) equals e^x to full f64 precision, while the
/// iteration rules would overflow e^{W−x}; return the asymptote directly.
const EXP_FORM_ASYMPTOTIC: f64 = -700.0;

/// W(x) for x ≥ 0, solving w·e^w = x.
///
/// Returns w ≥ 0 with |w·e^w − x| ≤ relative_tolerance·x.
pub fn lambert_w(x: f64, cfg: &WConfig) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(format!(
            "lambert_w requires a finite x >= 0 (principal branch), got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    // scaling the tolerance by x (not max(x, 1)) keeps the result accurate
    // relative to w itself in the W(x) ≈ x regime near zero
    let tol = cfg.relative_tolerance * x;
    let residual = |w: f64| w * w.exp() - x;

    // ln(1+x) is in the convergence basin for every x >= 0.
    let mut w = x.ln_1p();
    for _ in 0..cfg.max_iterations {
        let f = residual(w);
        if f.abs() <= tol {
            return Ok(w);
        }
        let ew = w.exp();
        let denom = (w + 1.0) * ew - (w + 2.0) * f / (2.0 * w + 2.0);
        let next = w - f / denom;
        if !next.is_finite() || next < 0.0 {
            return bisect_direct(x, tol, cfg);
        }
        w = next;
    }
    let f = residual(w);
    if f.abs() <= tol {
        Ok(w)
    } else {
        Err(Error::NoConvergence {
            iterations: cfg.max_iterations,
            last_iterate: w,
            residual: f,
        })
    }
}

/// W(exp(x)) for any finite x, solving w + ln(w) = x.
///
/// Returns w > 0 with |w + ln(w) − x| ≤ relative_tolerance·max(|x|, 1).
/// exp(x) itself is never evaluated, so exponents like x = 10^5 are fine.
pub fn lambert_w_exp(x: f64, cfg: &WConfig) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!(
            "lambert_w_exp requires finite x, got {x}"
        )));
    }
    if x <= EXP_FORM_ASYMPTOTIC {
        let w = x.exp();
        // keep the result strictly positive even past the underflow threshold
        return Ok(if w == 0.0 { f64::from_bits(1) } else { w });
    }
    let tol = cfg.relative_tolerance * x.abs().max(1.0);
    let residual = |w: f64| w + w.ln() - x;

    let mut w = if x >= 0.0 { x.max(1e-300) } else { 1.0 };
    for _ in 0..cfg.max_iterations {
        let f = residual(w);
        if f.abs() <= tol {
            return Ok(w);
        }
        let next = if x >= 0.0 {
            // e^{x−w} stays below the root's magnitude, no overflow risk
            let g = w - (x - w).exp();
            let denom = w + 1.0 - (w + 2.0) * g / (2.0 * w + 2.0);
            w - g / denom
        } else {
            let e = (w - x).exp();
            let g = w * e - 1.0;
            let denom = (w + 1.0) * e - (w + 2.0) * g / (2.0 * w + 2.0);
            w - g / denom
        };
        if !next.is_finite() || next <= 0.0 {
            return bisect_exp(x, tol, cfg);
        }
        w = next;
    }
    let f = residual(w);
    if f.abs() <= tol {
        Ok(w)
    } else {
        Err(Error::NoConvergence {
            iterations: cfg.max_iterations,
            last_iterate: w,
            residual: f,
        })
    }
}

/// Bisection on w·e^w = x over [0, ln(1+x)]; w·e^w is increasing and
/// ln(1+x)·(1+x) ≥ x, so the bracket always contains the root.
fn bisect_direct(x: f64, tol: f64, cfg: &WConfig) -> Result<f64> {
    let mut lo = 0.0_f64;
    let mut hi = x.ln_1p();
    let mut best = hi;
    let mut best_res = f64::INFINITY;
    for _ in 0..cfg.max_iterations.max(200) {
        let mid = 0.5 * (lo + hi);
        let f = mid * mid.exp() - x;
        if f.abs() < best_res {
            best_res = f.abs();
            best = mid;
        }
        if best_res <= tol || hi - lo <= f64::EPSILON * hi.abs() {
            return Ok(best);
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best_res <= tol {
        Ok(best)
    } else {
        Err(Error::NoConvergence {
            iterations: cfg.max_iterations.max(200),
            last_iterate: best,
            residual: best_res,
        })
    }
}

/// Bisection on w + ln(w) = x. For x < 1 the root is bracketed in log space
/// to keep resolution near zero.
fn bisect_exp(x: f64, tol: f64, cfg: &WConfig) -> Result<f64> {
    let iters = cfg.max_iterations.max(200);
    let (mut lo, mut hi, log_space) = if x >= 1.0 {
        (1.0_f64, x, false)
    } else {
        // u = ln w; e^u + u is increasing, negative at u = -745 for x > -745
        (-745.0_f64, 0.0_f64, true)
    };
    let mut best = hi;
    let mut best_res = f64::INFINITY;
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        let w = if log_space { mid.exp() } else { mid };
        let f = w + w.ln() - x;
        if f.abs() < best_res {
            best_res = f.abs();
            best = w;
        }
        if best_res <= tol {
            return Ok(best);
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best_res <= tol {
        Ok(best)
    } else {
        Err(Error::NoConvergence {
            iterations: iters,
            last_iterate: best,
            residual: best_res,
        })
    }
}

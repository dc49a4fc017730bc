//! Tail bounds for sums of independent bounded random variables.
//!
//! The crate computes upper bounds on Pr((1/n)·ΣX_i − (1/n)·ΣE[X_i] ≥ t)
//! (and the reflected lower-tail version) from per-variable summaries:
//!
//! * [`classical`] — Hoeffding from two-sided ranges; generalized Bennett
//!   and Bernstein from means, variances and a shared worst-case ceiling
//!   spread;
//! * [`refined`] — a strictly tighter Bennett-type bound that keeps every
//!   variable's own (μ_i, σ_i², M_i) and picks its Chernoff multiplier in
//!   closed form through Lambert's W function;
//! * [`lambertw`] — the W kernel itself, including the overflow-safe
//!   W(exp(x)) form;
//! * [`portfolio`] — underperformance probabilities and optimal budget
//!   allocation for independent investments;
//! * [`experiments`] — seeded comparison sweeps and a Monte Carlo validity
//!   oracle against extremal two-point laws.
//!
//! ```
//! use tailbound::{Investment, Method, underperformance_bound};
//!
//! let portfolio = [
//!     Investment::new("a", 30.0, 25.0, 25.0).unwrap(),
//!     Investment::new("b", 100.0, 20.0, 5.0).unwrap(),
//! ];
//! let bound = underperformance_bound(&portfolio, 74.0, Method::Refined).unwrap();
//! assert!((bound.probability - 0.390).abs() < 0.005);
//! ```

pub mod classical;
pub mod error;
pub mod experiments;
pub mod lambertw;
pub mod portfolio;
pub mod refined;

pub use classical::{
    bennett_upper, bernstein_upper, hoeffding_upper, lower_tail, reflect, reflect_ranges,
    BoundResult, BoundSide, Method, RangeSpec, VariableSpec,
};
pub use error::{Error, Result};
pub use experiments::{
    heterogeneous_trials, homogeneous_sweep, make_two_point, monte_carlo_tail, ExperimentRecord,
    LogBounds, TailEstimate, TwoPointDistribution,
};
pub use lambertw::{lambert_w, lambert_w_exp, WConfig};
pub use portfolio::{
    allocate, allocation_lambda, allocation_sweep, underperformance_bound, AllocationResult,
    Investment,
};
pub use refined::{
    b_lambda_log, lambda_star_combined, lambda_star_single, mgf_majorant_log, refined_lower,
    refined_upper, RefinedContext,
};

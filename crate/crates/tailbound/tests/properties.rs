//! Cross-module invariants, mostly property-based: residual contracts of the
//! W kernel, ordering and equivariance of the classical bounds, the
//! majorization facts behind the refined multiplier, and Monte Carlo
//! validity of the whole bound family.

use proptest::prelude::*;

use tailbound::classical::{
    bennett_upper, bernstein_upper, hoeffding_upper, lower_tail, reflect, Method, RangeSpec,
    VariableSpec,
};
use tailbound::experiments::monte_carlo_tail;
use tailbound::lambertw::{lambert_w, lambert_w_exp, WConfig};
use tailbound::portfolio::{allocate, Investment};
use tailbound::refined::{
    b_lambda_log, lambda_star_combined, lambda_star_single, mgf_majorant_log, refined_lower,
    refined_upper, RefinedContext,
};

fn cfg() -> WConfig {
    WConfig::default()
}

fn ceil(mu: f64, sigma: f64, m: f64) -> VariableSpec {
    VariableSpec::ceiling(mu, sigma, m).unwrap()
}

/// (s, σ², t) with t strictly inside (0, s).
fn single_instance() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.05f64..10.0, 0.001f64..20.0, 0.001f64..0.999)
        .prop_map(|(s, q2, frac)| (s, q2, frac * s))
}

/// Homogeneous (μ, σ, t) at ceiling M = 1.
fn homogeneous_instance() -> impl Strategy<Value = (f64, f64, f64)> {
    (-0.95f64..0.95, 0.01f64..=1.0, 0.005f64..0.995)
        .prop_map(|(mu, sigma, frac)| (mu, sigma, frac * (1.0 - mu)))
}

/// Heterogeneous spread/variance lists plus an in-domain t.
fn hetero_ctx() -> impl Strategy<Value = RefinedContext> {
    (
        prop::collection::vec((0.05f64..8.0, 0.005f64..10.0), 1..8),
        0.01f64..0.99,
    )
        .prop_map(|(pairs, frac)| {
            let (s, q2): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let s_bar = s.iter().sum::<f64>() / s.len() as f64;
            RefinedContext::new(s, q2, frac * s_bar).unwrap()
        })
}

proptest! {
    #[test]
    fn w_direct_residual_contract(x in 0.0f64..1e8) {
        let w = lambert_w(x, &cfg()).unwrap();
        prop_assert!(w >= 0.0);
        prop_assert!((w * w.exp() - x).abs() <= 1e-10 * x.max(1.0));
    }

    #[test]
    fn w_exp_residual_contract(x in -700.0f64..700.0) {
        let w = lambert_w_exp(x, &cfg()).unwrap();
        prop_assert!(w > 0.0);
        prop_assert!((w + w.ln() - x).abs() <= 1e-10 * x.abs().max(1.0));
    }

    #[test]
    fn w_forms_agree(x in -30.0f64..30.0) {
        let we = lambert_w_exp(x, &cfg()).unwrap();
        let wd = lambert_w(x.exp(), &cfg()).unwrap();
        prop_assert!((we - wd).abs() < 1e-9 * (1.0 + we));
    }

    #[test]
    fn bennett_never_looser_than_bernstein(
        pairs in prop::collection::vec((-5.0f64..5.0, 0.01f64..3.0, 0.01f64..6.0), 1..10),
        t in 0.001f64..4.0,
    ) {
        let vars: Vec<VariableSpec> = pairs
            .iter()
            .map(|&(mu, sigma, gap)| ceil(mu, sigma, mu + gap))
            .collect();
        let bn = bennett_upper(&vars, t).unwrap();
        let bs = bernstein_upper(&vars, t).unwrap();
        prop_assert!(bn.raw_log_bound <= bs.raw_log_bound + 1e-12);
    }

    #[test]
    fn classical_bounds_nonincreasing_in_t(
        (mu, sigma, _) in homogeneous_instance(),
        t0 in 0.01f64..1.0,
    ) {
        let vars = [ceil(mu, sigma, 1.0)];
        let ranges = [RangeSpec::new(-1.0, 1.0).unwrap()];
        let mut prev = (0.0f64, 0.0f64, 0.0f64);
        for k in 0..10 {
            let t = t0 * (1.0 + k as f64 * 0.3);
            let cur = (
                hoeffding_upper(&ranges, t).unwrap().raw_log_bound,
                bennett_upper(&vars, t).unwrap().raw_log_bound,
                bernstein_upper(&vars, t).unwrap().raw_log_bound,
            );
            if k > 0 {
                prop_assert!(cur.0 <= prev.0 + 1e-12);
                prop_assert!(cur.1 <= prev.1 + 1e-12);
                prop_assert!(cur.2 <= prev.2 + 1e-12);
            }
            prev = cur;
        }
    }

    #[test]
    fn classical_bounds_scale_invariant(
        pairs in prop::collection::vec((-2.0f64..2.0, 0.05f64..2.0, 0.05f64..4.0), 1..6),
        t in 0.01f64..2.0,
        c in 0.001f64..1000.0,
    ) {
        let vars: Vec<VariableSpec> = pairs
            .iter()
            .map(|&(mu, sigma, gap)| ceil(mu, sigma, mu + gap))
            .collect();
        let scaled: Vec<VariableSpec> = pairs
            .iter()
            .map(|&(mu, sigma, gap)| ceil(c * mu, c * sigma, c * (mu + gap)))
            .collect();
        let ranges: Vec<RangeSpec> = vars
            .iter()
            .map(|v| RangeSpec::new(v.mu - 2.0 * v.spread(), v.bound_value).unwrap())
            .collect();
        let ranges_scaled: Vec<RangeSpec> = ranges
            .iter()
            .map(|r| RangeSpec::new(c * r.lo, c * r.hi).unwrap())
            .collect();

        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(1e-30);
        prop_assert!(rel(
            bennett_upper(&vars, t).unwrap().raw_log_bound,
            bennett_upper(&scaled, c * t).unwrap().raw_log_bound
        ));
        prop_assert!(rel(
            bernstein_upper(&vars, t).unwrap().raw_log_bound,
            bernstein_upper(&scaled, c * t).unwrap().raw_log_bound
        ));
        prop_assert!(rel(
            hoeffding_upper(&ranges, t).unwrap().raw_log_bound,
            hoeffding_upper(&ranges_scaled, c * t).unwrap().raw_log_bound
        ));
    }

    #[test]
    fn minimizer_is_nonnegative_and_stationary((s, q2, t) in single_instance()) {
        let lam = lambda_star_single(s, q2, t).unwrap();
        prop_assert!(lam >= 0.0);
        // interior stationarity by central differences
        let b = |l: f64| mgf_majorant_log(s, q2, l) - l * t;
        let h = 1e-6 * lam.max(1e-2);
        let deriv = (b(lam + h) - b(lam - h)) / (2.0 * h);
        prop_assert!(deriv.abs() < 1e-6, "b'({lam}) = {deriv:e} for ({s}, {q2}, {t})");
    }

    #[test]
    fn quadratic_majorization_caps_b_i(
        (s, q2, t) in single_instance(),
        lam_frac in 0.0f64..4.0,
    ) {
        let lam_star = lambda_star_single(s, q2, t).unwrap();
        let cap = s * s / -(-s * s / q2).exp_m1();
        let b = |l: f64| mgf_majorant_log(s, q2, l) - l * t;
        let lam = lam_frac * lam_star.max(0.1 / s);
        let quad = cap * (lam - lam_star) * (lam - lam_star) / 2.0 + b(lam_star);
        prop_assert!(
            b(lam) <= quad + 1e-10,
            "b({lam}) = {} above quadratic {quad} for ({s}, {q2}, {t})",
            b(lam)
        );
    }

    #[test]
    fn curvature_cap_never_exceeded((s, q2, _) in single_instance()) {
        // dropped-term curvature σ²e^{λs}/(γ(e^{λs}−λs−1)+1) peaks at λ = s/σ²
        let cap = s * s / -(-s * s / q2).exp_m1();
        let gamma = q2 / (s * s);
        let lam_peak = s / q2;
        let lam_max = (3.0 * lam_peak).min(700.0 / s);
        for k in 0..=200 {
            let lam = lam_max * k as f64 / 200.0;
            let u = lam * s;
            let curv = q2 * u.exp() / (gamma * (u.exp() - u - 1.0) + 1.0);
            prop_assert!(
                curv <= cap + 1e-10 * cap.max(1.0),
                "curvature {curv} above cap {cap} at λ = {lam}"
            );
        }
    }

    #[test]
    fn combined_multiplier_reduces_to_theorem3(
        (mu, sigma, t) in homogeneous_instance(),
        n in 1usize..7,
    ) {
        let s = 1.0 - mu;
        let single = lambda_star_single(s, sigma * sigma, t).unwrap();
        let ctx = RefinedContext::new(vec![s; n], vec![sigma * sigma; n], t).unwrap();
        let combined = lambda_star_combined(&ctx).unwrap();
        prop_assert!((combined - single).abs() <= 1e-12 * single.max(1e-30));
    }

    #[test]
    fn refined_dominates_in_homogeneous_setting(
        (mu, sigma, t) in homogeneous_instance(),
        n in 1usize..5,
    ) {
        let vars = vec![ceil(mu, sigma, 1.0); n];
        let r = refined_upper(&vars, t).unwrap().raw_log_bound;
        let bn = bennett_upper(&vars, t).unwrap().raw_log_bound;
        let bs = bernstein_upper(&vars, t).unwrap().raw_log_bound;
        prop_assert!(r <= bn + 1e-10, "refined {r} > bennett {bn}");
        prop_assert!(bn <= bs + 1e-12, "bennett {bn} > bernstein {bs}");
    }

    #[test]
    fn lower_tail_is_reflected_upper_tail(
        pairs in prop::collection::vec((-3.0f64..3.0, 0.05f64..2.0, 0.05f64..5.0), 1..6),
        frac in 0.05f64..0.95,
    ) {
        let floors: Vec<VariableSpec> = pairs
            .iter()
            .map(|&(mu, sigma, gap)| VariableSpec::floor(mu, sigma, mu - gap).unwrap())
            .collect();
        let reflected = reflect(&floors);
        let s_bar = floors.iter().map(VariableSpec::spread).sum::<f64>() / floors.len() as f64;
        let t = frac * s_bar;

        let low = lower_tail(Method::Bennett, &floors, t).unwrap();
        let up = bennett_upper(&reflected, t).unwrap();
        prop_assert_eq!(low.raw_log_bound, up.raw_log_bound);

        let low = refined_lower(&floors, t).unwrap();
        let up = refined_upper(&reflected, t).unwrap();
        prop_assert_eq!(low.raw_log_bound, up.raw_log_bound);
        // involution round-trips bit-for-bit
        prop_assert_eq!(reflect(&reflected), floors);
    }

    #[test]
    fn single_asset_allocation_matches_refined_lower(
        mu in 0.2f64..3.0,
        sigma in 0.05f64..2.0,
        gap_frac in 0.1f64..0.9,
        tau_frac in 0.05f64..0.95,
    ) {
        let floor = mu * (1.0 - gap_frac);
        let inv = Investment::new("x", mu, sigma, floor).unwrap();
        let tau = floor + tau_frac * (mu - floor);
        let alloc = allocate(std::slice::from_ref(&inv), tau).unwrap();
        let bound = refined_lower(&[inv.to_variable_spec()], mu - tau).unwrap();
        prop_assert!(
            (alloc.phi_bound - bound.probability).abs() <= 1e-12 * bound.probability.max(1e-300)
        );
    }
}

/// Any λ ≥ 0 must give a valid bound: the measured tail of the extremal
/// two-point laws never exceeds exp(b_lambda_log) beyond sampling error.
#[test]
fn b_lambda_valid_for_arbitrary_multipliers() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240_u64);
    for case in 0..40 {
        let n = rng.random_range(1..=6);
        let vars: Vec<VariableSpec> = (0..n)
            .map(|_| {
                let mu = rng.random_range(-2.0..2.0);
                let sigma = rng.random_range(0.05..1.5);
                let gap = rng.random_range(0.1..3.0);
                ceil(mu, sigma, mu + gap)
            })
            .collect();
        let s_bar = vars.iter().map(VariableSpec::spread).sum::<f64>() / n as f64;
        let t = rng.random_range(0.05..0.95) * s_bar;
        let ctx = RefinedContext::from_ceiling_specs(&vars, t).unwrap();
        let lambda = rng.random_range(0.0..4.0);
        let bound = b_lambda_log(&ctx, lambda).exp();
        let est = monte_carlo_tail(&vars, t, 20_000, 9000 + case).unwrap();
        assert!(
            est.estimate <= bound + 3.0 * est.std_error + 1e-12,
            "case {case}: estimate {} above B({lambda}) = {bound}",
            est.estimate
        );
    }
}

/// The polished bound stays valid too (it is just another λ ≥ 0).
#[test]
fn polished_bound_remains_valid() {
    use tailbound::refined::refined_upper_polished;
    let vars = [ceil(0.3, 0.4, 1.2), ceil(-0.5, 0.2, 0.1)];
    let t = 0.3;
    let plain = refined_upper(&vars, t).unwrap();
    let polished = refined_upper_polished(&vars, t).unwrap();
    assert!(polished.raw_log_bound <= plain.raw_log_bound + 1e-15);
    let est = monte_carlo_tail(&vars, t, 200_000, 77).unwrap();
    assert!(est.estimate <= polished.probability + 3.0 * est.std_error + 1e-12);
}

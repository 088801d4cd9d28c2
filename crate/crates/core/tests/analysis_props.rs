//! First- and second-moment rates and the large-deviation system.

use std::f64::consts::LN_2;

use proptest::prelude::*;

use solspace::deviations::{
    big_b, big_omega, critical_density, default_bracket, main_inequality_holds, max_b_on_box,
    normalised_critical_density, omega_fn, region_bounds, s_of, s_root, solve_stationary, solve_stationary_multistart,
    stationary_closures, DEFAULT_TOL,
};
use solspace::rates::{
    entropy, forbidden_intervals, g_c, g_c_min, lambda_pair, ln_lambda_pair, tau_k, u_k_density, u_k_min,
};
use solspace::reference::{asymptotic_ratio, C_K};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_is_symmetric_and_bounded(a in 0.0f64..=1.0) {
        prop_assert!((entropy(a) - entropy(1.0 - a)).abs() < 1e-12);
        prop_assert!(entropy(a) >= 0.0 && entropy(a) <= LN_2 + 1e-15);
    }

    #[test]
    fn pair_rate_decreases_in_density(a in 0.01f64..0.99, k in 3u32..12, r in 1.0f64..100.0, dr in 0.1f64..10.0) {
        prop_assert!(ln_lambda_pair(a, k, r + dr) < ln_lambda_pair(a, k, r));
        prop_assert!((lambda_pair(a, k, r).ln() - ln_lambda_pair(a, k, r)).abs() < 1e-9);
    }

    #[test]
    fn minima_are_minima(k in 3u32..16, a in 0.01f64..0.99) {
        prop_assert!(u_k_min(k).0 <= u_k_density(k, a) + 1e-9);
        prop_assert!(g_c_min(k).0 <= g_c(k, a) + 1e-12);
    }

    #[test]
    fn omega_is_nonnegative_and_convex(x in -1.0f64..5.0, h in 1e-3f64..0.1) {
        let w = |x: f64| omega_fn(x).unwrap();
        prop_assert!(w(x) >= 0.0);
        if x - h >= -1.0 {
            prop_assert!(w(x - h) + w(x + h) - 2.0 * w(x) >= -1e-12);
        }
    }

    #[test]
    fn stationary_points_solve_the_system(row in 0usize..5, alpha in 0.15f64..0.45, t in 0.995f64..1.005) {
        let k = C_K[row].k;
        let r = t * C_K[row].c_k;
        let sol = solve_stationary(k, r, alpha, None, DEFAULT_TOL).unwrap();
        prop_assert!(sol.max_residual() < 1e-9, "residuals {:?}", sol.residuals);
        prop_assert!(sol.has_extremum_signs(1e-12));
        let (d0, e0) = region_bounds(k, r, alpha).unwrap();
        prop_assert!(sol.point.delta >= d0 && sol.point.epsilon <= e0);
        // The stationary point sits on the constraint surface Ω = s.
        prop_assert!((sol.omega_value - s_of(k, r)).abs() < 1e-9);
        prop_assert!((big_omega(&sol.point) - sol.omega_value).abs() < 1e-12);
        prop_assert!((big_b(&sol.point) - sol.b_value).abs() < 1e-12);
        let (zeta, mu) = stationary_closures(&sol.point).unwrap();
        prop_assert!((zeta - sol.point.zeta).abs() < 1e-9 && (mu - sol.point.mu).abs() < 1e-6 * mu);
    }
}

#[test]
fn forbidden_intervals_are_ordered_and_below_one() {
    for (k, r) in [(8, 169.0), (8, 160.0), (10, 690.0), (6, 40.0)] {
        let rep = forbidden_intervals(k, r, 20_000, 1e-14).unwrap();
        let iv = &rep.sub_unit_intervals;
        assert!(iv.windows(2).all(|w| w[0].1 < w[1].0), "{iv:?}");
        for &(a, b) in iv {
            assert!((0.0..=1.0).contains(&a) && a < b && b <= 1.0);
            assert!(lambda_pair(0.5 * (a + b), k, r) < 1.0);
        }
        if let Some(d) = rep.delta {
            assert_eq!(d, iv[0].0);
        }
    }
}

#[test]
fn tau_exceeds_minimum_of_g_c() {
    for k in 14..=30 {
        let tau = tau_k(k);
        assert!(tau < 1.0 && g_c_min(k).0 < tau, "k = {k}");
    }
}

#[test]
fn multistart_agrees_with_default_start() {
    for row in C_K {
        let a = solve_stationary(row.k, row.c_k, row.alpha_m, None, DEFAULT_TOL).unwrap();
        let b = solve_stationary_multistart(row.k, row.c_k, row.alpha_m, DEFAULT_TOL).unwrap();
        assert!((a.point.delta - b.point.delta).abs() < 1e-8 && (a.point.epsilon - b.point.epsilon).abs() < 1e-8);
    }
}

#[test]
fn b_changes_sign_once_across_the_bracket() {
    let (lo, hi) = default_bracket(9);
    assert!(hi < s_root(9));
    let c = critical_density(9, 0.265, lo, hi, 1e-9).unwrap();
    for r in [c - 2.0, c - 0.5] {
        assert!(solve_stationary(9, r, 0.265, None, DEFAULT_TOL).unwrap().b_value > 0.0);
    }
    for r in [c + 0.5, c + 2.0] {
        assert!(solve_stationary(9, r, 0.265, None, DEFAULT_TOL).unwrap().b_value < 0.0);
    }
}

/// Where the closed-form inequality holds, B is negative on the whole box.
#[test]
fn main_inequality_is_sufficient() {
    let mut checked = 0;
    for k in [14, 16] {
        for alpha in [0.2, 0.35, 0.5, 0.65, 0.8] {
            for c in [0.85, 0.9, 0.95, 0.99] {
                if main_inequality_holds(k, alpha, c) {
                    let r = c * 2f64.powi(k as i32) * LN_2;
                    if let Some(b) = max_b_on_box(k, r, alpha, 60).unwrap() {
                        assert!(b < 0.0, "k = {k}, α = {alpha}, c = {c}: max B = {b}");
                    }
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 0);
}

/// The normalised critical density at α = 1/2 approaches 1/(1 + α(1 − α))
/// = 0.8; the check point is k = 30.
#[test]
fn asymptotic_ratio_at_k30() {
    let got = normalised_critical_density(30, 0.5).unwrap();
    let want = asymptotic_ratio(0.5);
    assert!((got - want).abs() <= 0.02, "k = 30: {got:.5} vs limit {want}");
}

/// Convergence toward the limit is monotone and reaches 0.02 by k = 400.
#[test]
fn asymptotic_ratio_converges_from_above() {
    let ks = [14, 20, 30, 50, 100, 200, 400];
    let vals: Vec<f64> = ks.iter().map(|&k| normalised_critical_density(k, 0.5).unwrap()).collect();
    let want = asymptotic_ratio(0.5);
    assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    assert!(vals.iter().all(|&v| v > want));
    assert!((vals[6] - want).abs() <= 0.02, "k = 400: {}", vals[6]);
}

#[test]
fn epsilon_box_edge_is_small() {
    for k in 3..=20 {
        for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let r = 0.95 * s_root(k);
            let (_, e0) = region_bounds(k, r, alpha).unwrap();
            assert!(e0 <= 2.0 / (k as f64 - 1.0), "k = {k}, α = {alpha}: ε₀ = {e0}");
        }
    }
}

/// Λ(·, 8, 169) crosses 1 between 0.672 and 0.674.
#[test]
fn third_crossing_location() {
    assert!(lambda_pair(0.672, 8, 169.0) > 1.0);
    assert!(lambda_pair(0.674, 8, 169.0) < 1.0);
}

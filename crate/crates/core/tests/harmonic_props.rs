use mono_core::arith::gcd_u64;
use mono_core::harmonic::hypotheses::{
    decay_grid, fourier_decay_sup, hua_check, majorant_norm_fit, minor_arc_sample, primorial_modulus, HuaMajorant,
    HuaParams,
};
use mono_core::harmonic::{
    build_majorant, divisor_partial, gauss_bound, gauss_sum, lp_moment_even, lp_norm_quadrature, majorant_fourier,
    rational_approx, w_gauss_bound, w_gauss_vanishes, w_gauss_vanishing_check, ExpSum,
};
use mono_core::{Term, WeightedSet};
use proptest::prelude::*;

fn hua_grid() -> Vec<u64> {
    (14..=20).map(|k| 1u64 << k).collect()
}

#[test]
fn hua_ratio_of_composite_majorant_has_slope_minus_half() {
    let report = hua_check(HuaMajorant::NuNu, &HuaParams::default(), &hua_grid()).unwrap();
    let ratios: Vec<f64> = report.rows.iter().map(|r| r.ratio()).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
    assert!((report.fit.slope + 0.5).abs() <= 0.1, "slope {}", report.fit.slope);
}

#[test]
fn hua_ratio_of_other_composites_decreases() {
    let grid: Vec<u64> = (14..=18).map(|k| 1u64 << k).collect();
    for kind in [
        HuaMajorant::NuSquare,
        HuaMajorant::NuInterval,
        HuaMajorant::SquareInterval,
    ] {
        let report = hua_check(kind, &HuaParams::default(), &grid).unwrap();
        let ratios: Vec<f64> = report.rows.iter().map(|r| r.ratio()).collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{kind:?}: {ratios:?}");
        // N^(eps - 1/2) for some small eps
        assert!(
            report.fit.slope < -0.3 && report.fit.slope > -0.7,
            "{kind:?}: slope {}",
            report.fit.slope
        );
    }
}

#[test]
fn plain_majorant_ratio_has_slope_minus_quarter() {
    let fit = majorant_norm_fit(2, 1, &hua_grid()).unwrap();
    assert!((fit.slope + 0.25).abs() <= 0.05, "slope {}", fit.slope);
}

#[test]
fn fourier_decay_is_monotone_in_w() {
    // W = 4620 needs N large enough that the support (~sqrt(2N/W)) is not tiny
    let n = 1 << 28;
    let points = decay_grid(30, 1 << 10);
    let sups: Vec<f64> = [3, 5, 7, 11]
        .iter()
        .map(|&w| {
            let big_w = primorial_modulus(w);
            fourier_decay_sup(&build_majorant(n, big_w, 1).unwrap(), &points)
        })
        .collect();
    assert!(sups.windows(2).all(|s| s[1] <= s[0]), "{sups:?}");
}

#[test]
fn minor_arc_values_are_small() {
    for k in [16, 18] {
        let nu = build_majorant(1 << k, 2, 1).unwrap();
        let sample = minor_arc_sample(&nu, 200, 50, 17 + k).unwrap();
        assert_eq!(sample.ratios.len(), 200);
        assert!(sample.max_ratio <= 0.2, "N = 2^{k}: {}", sample.max_ratio);
    }
}

#[test]
fn vanishing_exhaustive() {
    for w in [2u64, 4, 6, 12, 30] {
        for xi in (1..=w).filter(|&x| gcd_u64(x, w) == 1) {
            for q in 1..=60u64 {
                for a in (1..=q).filter(|&a| gcd_u64(a, q) == 1) {
                    let m = w_gauss_vanishing_check(w, xi, a as i128, q).unwrap().norm();
                    if w_gauss_vanishes(w, q) {
                        assert!(m <= 1e-10, "W={w} xi={xi} a={a} q={q}: {m}");
                    } else {
                        assert!(m <= w_gauss_bound(w, q) + 1e-10, "W={w} xi={xi} a={a} q={q}: {m}");
                    }
                }
            }
        }
    }
}

#[test]
fn fourier_grid_examples() {
    let nu = build_majorant(12, 2, 1).unwrap();
    let g = majorant_fourier(&nu, 2).unwrap();
    assert!((g.values()[0].re - nu.l1() as f64).abs() < 1e-12);
    assert!((g.values()[1].norm() - 15.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn gauss_bound_random(q in 1u64..3000, a in -5000i128..5000, b in -5000i128..5000) {
        let m = gauss_sum(q, a, b).unwrap().norm_sqr();
        prop_assert!(m <= gauss_bound(q, a) + 1e-12);
    }

    #[test]
    fn parseval_for_weighted_sequences(pairs in prop::collection::vec((1u64..500, 1u64..50), 1..40)) {
        let set = WeightedSet::from_weighted(pairs.clone()).unwrap();
        let l2: u128 = set.iter().map(|(_, w)| (w * w) as u128).sum();
        let exact = lp_moment_even(&[Term::linear(1, set).unwrap()], 2).unwrap();
        prop_assert_eq!(exact, l2);
    }

    #[test]
    fn quadratic_quadrature_matches_exact(pairs in prop::collection::vec((1u64..16, 1u64..5), 1..10)) {
        let set = WeightedSet::from_weighted(pairs).unwrap();
        let f = ExpSum::quadratic(set.iter().map(|(x, w)| (x as i64, w as f64)), 1);
        let g = f.grid(2048).unwrap();
        let exact = lp_moment_even(&[Term::square(1, set).unwrap()], 4).unwrap() as f64;
        let quad = lp_norm_quadrature(&g, 4.0).unwrap();
        prop_assert!((quad - exact).abs() <= 1e-6 * exact);
    }

    #[test]
    fn grid_respects_triangle_inequality(w in 1u64..20, xi in 1u64..20, n in 1u64..5000, m in 1usize..300) {
        let w = 2 * w;
        prop_assume!(xi <= w && gcd_u64(xi, w) == 1);
        let nu = build_majorant(n, w, xi).unwrap();
        let g = majorant_fourier(&nu, m).unwrap();
        prop_assert!(g.sup() <= nu.l1() as f64 * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn approximation_is_reduced_and_capped(alpha in 0.0f64..1.0, cap in 1u64..100_000) {
        let r = rational_approx(alpha, cap).unwrap();
        prop_assert!(r.q <= cap && r.a < r.q.max(1));
        prop_assert_eq!(gcd_u64(r.a, r.q), 1);
        // Dirichlet: some q' <= cap has |alpha - a'/q'| < 1/(q' (cap + 1)), and the best is no worse
        prop_assert!(r.err <= 1.0 / (cap + 1) as f64 + 1e-15);
    }

    #[test]
    fn divisor_count_matches_naive(n in 1i128..100_000, cap in 1u64..400) {
        let d = divisor_partial(n, cap);
        prop_assert!(d <= cap && d >= 1);
        prop_assert_eq!(d, (1..=cap).filter(|&q| n % q as i128 == 0).count() as u64);
    }
}

mod common;

use std::f64::consts::LN_2;

use common::*;
use elliptic_drum::geometry::EllipseGeometry;
use elliptic_drum::mathieu::{ModeIndex, Parity};
use elliptic_drum::qsolve::{
    boundary_value, build_table, complex_step_derivative, frequency, radial_zero_count,
    radial_zeros, refine_root_with, scaled_boundary_value, scan_brackets, solve_mode, Objective,
    SolverConfig,
};
use elliptic_drum::Error;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn even_table_matches_oracle() {
    let cells = build_table(Parity::Even, 0..=5, 1..=4, BETA0, &SolverConfig::default());
    assert_eq!(cells.len(), 24);
    for c in cells {
        let spec = c.result.unwrap();
        let want = oracle(Parity::Even, c.g, c.k);
        assert!(
            rel(spec.q, want) < 1e-9,
            "g={} k={}: {} vs {want}",
            c.g,
            c.k,
            spec.q
        );
    }
}

#[test]
fn odd_table_matches_oracle() {
    let cells = build_table(Parity::Odd, 1..=5, 1..=4, BETA0, &SolverConfig::default());
    assert_eq!(cells.len(), 20);
    for c in cells {
        let spec = c.result.unwrap();
        let want = oracle(Parity::Odd, c.g, c.k);
        assert!(
            rel(spec.q, want) < 1e-9,
            "g={} k={}: {} vs {want}",
            c.g,
            c.k,
            spec.q
        );
    }
}

#[test]
fn high_order_roots_match_oracle() {
    assert!(rel(solve(Parity::Even, 11, 1).q, ORACLE_E11_K1) < 1e-9);
    assert!(rel(solve(Parity::Even, 13, 1).q, ORACLE_E13_K1) < 1e-9);
}

#[test]
fn table_columns_increase_with_g_and_k() {
    for (parity, g) in table_orders() {
        let qs: Vec<f64> = (1..=4).map(|k| oracle(parity, g, k)).collect();
        assert!(qs.windows(2).all(|w| w[0] < w[1]));
    }
    let cells = build_table(Parity::Even, 0..=5, 1..=1, BETA0, &SolverConfig::default());
    let firsts: Vec<f64> = cells.iter().map(|c| c.result.as_ref().unwrap().q).collect();
    assert!(firsts.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn odd_root_exceeds_even_root_of_same_order() {
    for g in 1..=5 {
        for k in 1..=4 {
            assert!(
                solve(Parity::Odd, g, k).q > solve(Parity::Even, g, k).q,
                "g={g} k={k}"
            );
        }
    }
}

#[test]
fn solved_roots_carry_certificates() {
    for (parity, g) in table_orders() {
        for k in 1..=4 {
            let spec = solve(parity, g, k);
            assert_eq!(
                radial_zero_count(index(parity, g), spec.q, BETA0).unwrap(),
                k
            );
            assert!(spec.residual.abs() < 1e-9);
            assert_eq!(spec.beta0, BETA0);
            assert!(spec.newton_iters <= SolverConfig::default().max_newton_iters);
        }
    }
}

#[test]
#[allow(clippy::approx_constant)]
fn first_radial_zero_of_fundamental() {
    let z = radial_zeros(ModeIndex::even(0), 1.7353, 1.0).unwrap();
    assert!((z[0] - 0.6931).abs() <= 2e-4, "{z:?}");
}

#[test]
fn radial_zero_count_examples() {
    assert_eq!(
        radial_zero_count(ModeIndex::even(0), ORACLE_EVEN[0][0], LN_2).unwrap(),
        1
    );
    assert_eq!(
        radial_zero_count(ModeIndex::even(0), ORACLE_EVEN[0][3], LN_2).unwrap(),
        4
    );
    assert_eq!(radial_zero_count(ModeIndex::odd(3), 1.0, LN_2).unwrap(), 0);
}

#[test]
fn plain_and_scaled_objectives_give_the_same_root() {
    let cfg = SolverConfig::default();
    for (parity, g) in [(Parity::Odd, 1), (Parity::Odd, 4), (Parity::Even, 2)] {
        let idx = index(parity, g);
        for b in scan_brackets(idx, BETA0, 4, &cfg).unwrap() {
            let plain = refine_root_with(idx, &b, BETA0, &cfg, Objective::Plain).unwrap();
            let scaled = refine_root_with(idx, &b, BETA0, &cfg, Objective::Scaled).unwrap();
            assert!(rel(plain.q, scaled.q) < 1e-11, "{parity:?} g={g} k={}", b.k);
        }
    }
}

#[test]
fn roots_depend_only_on_beta0() {
    // Two ellipses with the same aspect but different size share q.
    let small = EllipseGeometry::from_semiaxes(5.0, 3.0).unwrap();
    let large = EllipseGeometry::from_semiaxes(50.0, 30.0).unwrap();
    assert!((small.beta0() - large.beta0()).abs() < 1e-15);
    let spec = solve(Parity::Even, 3, 1);
    let (l_small, _) = frequency(&spec, &small).unwrap();
    let (l_large, _) = frequency(&spec, &large).unwrap();
    assert!((l_small / l_large - 10.0).abs() < 1e-12);
}

#[test]
fn frequency_factor_of_fundamental() {
    let spec = solve(Parity::Even, 0, 1);
    let (lambda, rate) = frequency(&spec, &geometry()).unwrap();
    assert!((lambda - ORACLE_EVEN[0][0].sqrt() / 4.0).abs() < 1e-9);
    assert!((rate - 2.0 * lambda).abs() < 1e-15);
}

#[test]
fn complex_step_matches_central_difference_at_roots() {
    for (parity, g) in table_orders() {
        let idx = index(parity, g);
        for k in 1..=4 {
            let q = oracle(parity, g, k);
            let f = |z: Complex64| boundary_value(idx, z, BETA0);
            let (_, cs) = complex_step_derivative(f, q, 1e-10 * q).unwrap();
            let fr = |x: f64| f(Complex64::new(x, 0.0)).unwrap().re;
            let cd = (fr(q + 1e-5) - fr(q - 1e-5)) / 2e-5;
            assert!(
                (cs - cd).abs() <= 1e-5 * cs.abs(),
                "{parity:?} g={g} k={k}: {cs} vs {cd}"
            );
        }
    }
}

#[test]
fn even_boundary_amplitude_stays_bounded() {
    for g in 0..=2u32 {
        let idx = ModeIndex::even(g);
        let mut q = 60.0;
        while q <= 110.0 {
            let v = boundary_value(idx, Complex64::new(q, 0.0), BETA0)
                .unwrap()
                .re;
            assert!(v.abs() <= 1.2, "g={g} q={q}: {v}");
            q += 0.25;
        }
    }
}

#[test]
fn too_small_search_range_is_reported() {
    let cfg = SolverConfig {
        q_max: 5.0,
        ..SolverConfig::default()
    };
    match solve_mode(ModeIndex::even(0), 3, BETA0, &cfg) {
        Err(Error::TooFewBrackets { found, wanted, .. }) => {
            assert_eq!((found, wanted), (1, 3));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn invalid_configuration_is_rejected() {
    let cfg = SolverConfig {
        h_rel: 1e-3,
        ..SolverConfig::default()
    };
    assert!(matches!(
        solve_mode(ModeIndex::even(0), 1, BETA0, &cfg),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn other_aspect_ratio_certifies() {
    let geom = EllipseGeometry::from_semiaxes(2.0, 1.0).unwrap();
    let cfg = SolverConfig::default();
    for k in 1..=3 {
        let spec = solve_mode(ModeIndex::odd(2), k, geom.beta0(), &cfg).unwrap();
        assert_eq!(
            radial_zero_count(ModeIndex::odd(2), spec.q, geom.beta0()).unwrap(),
            k
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn complex_step_agrees_with_central_difference(
        odd in any::<bool>(),
        g in 1u32..=5,
        q in 1.0f64..100.0,
    ) {
        let idx = if odd { ModeIndex::odd(g) } else { ModeIndex::even(g) };
        let f = |z: Complex64| boundary_value(idx, z, BETA0);
        let (v, cs) = complex_step_derivative(f, q, 1e-10 * q).unwrap();
        let fr = |x: f64| f(Complex64::new(x, 0.0)).unwrap().re;
        prop_assert!((v - fr(q)).abs() <= 1e-12 * v.abs().max(1e-2), "{} vs {}", v, fr(q));
        let cd = (fr(q + 1e-5) - fr(q - 1e-5)) / 2e-5;
        prop_assert!((cs - cd).abs() <= 1e-5 * cs.abs().max(cd.abs()).max(1e-6), "{cs} vs {cd}");
    }

    #[test]
    fn scaled_objective_has_the_same_sign(odd in any::<bool>(), g in 1u32..=5, q in 0.5f64..110.0) {
        let idx = if odd { ModeIndex::odd(g) } else { ModeIndex::even(g) };
        let plain = boundary_value(idx, Complex64::new(q, 0.0), BETA0).unwrap().re;
        let scaled = scaled_boundary_value(idx, q, BETA0).unwrap();
        prop_assert_eq!(plain > 0.0, scaled > 0.0);
    }
}

mod common;

use std::f64::consts::PI;

use common::second_difference;
use elliptic_drum::mathieu::{self, ModeIndex, Parity};
use elliptic_drum::Error;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn real(q: f64) -> Complex64 {
    Complex64::new(q, 0.0)
}

fn l1(e: &mathieu::MathieuExpansion) -> f64 {
    e.coeffs().iter().map(|c| c.norm()).sum()
}

fn weighted_l1(e: &mathieu::MathieuExpansion) -> f64 {
    e.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| f64::from(e.basis().harmonic(i)) * c.norm())
        .sum()
}

fn parity_and_g() -> impl Strategy<Value = ModeIndex> {
    prop_oneof![
        (0u32..=8).prop_map(ModeIndex::even),
        (1u32..=8).prop_map(ModeIndex::odd),
    ]
}

/// Unsymmetrised recurrence for the cosine-even class, as written in the
/// three-term relation.
fn raw_cos_even(q: f64, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = (2 * i * 2 * i) as f64;
        if i + 1 < n {
            m[(i, i + 1)] = q;
            m[(i + 1, i)] = q;
        }
    }
    m[(1, 0)] = 2.0 * q;
    m
}

#[test]
fn nonsymmetric_eigen_matches_cosine_even_values() {
    for q in [0.5, 5.0, 40.0] {
        let mut eig: Vec<f64> = raw_cos_even(q, 50)
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .collect();
        eig.sort_by(f64::total_cmp);
        for g in [0u32, 2, 4, 6] {
            let a = mathieu::char_value(ModeIndex::even(g), q).unwrap();
            assert!(
                (a - eig[g as usize / 2]).abs() < 1e-8 * a.abs().max(1.0),
                "q={q} g={g}"
            );
        }
    }
}

#[test]
fn characteristic_values_at_zero_q_are_squares() {
    for g in 0..=10u32 {
        let a = mathieu::char_value(ModeIndex::even(g), 0.0).unwrap();
        assert!((a - f64::from(g * g)).abs() < 1e-12);
        if g > 0 {
            let b = mathieu::char_value(ModeIndex::odd(g), 0.0).unwrap();
            assert!((b - f64::from(g * g)).abs() < 1e-12);
        }
    }
}

#[test]
fn known_characteristic_values() {
    // a_0(1) and b_1(1), b_2(1) to ten digits.
    let cases = [
        (ModeIndex::even(0), 1.0, -0.4551386041),
        (ModeIndex::even(1), 1.0, 1.859108072),
        (ModeIndex::odd(1), 1.0, -0.1102488170),
        (ModeIndex::odd(2), 1.0, 3.917024773),
    ];
    for (idx, q, want) in cases {
        let a = mathieu::char_value(idx, q).unwrap();
        assert!((a - want).abs() < 2e-9, "{idx:?}: {a} vs {want}");
    }
}

#[test]
fn basis_mismatch_is_reported() {
    let e = mathieu::expansion(ModeIndex::even(2), real(3.0)).unwrap();
    assert!(matches!(e.se(0.3), Err(Error::BasisMismatch { .. })));
    let o = mathieu::expansion(ModeIndex::odd(2), real(3.0)).unwrap();
    assert!(matches!(o.mod_ce(0.3), Err(Error::BasisMismatch { .. })));
}

#[test]
fn odd_family_rejects_zero_order() {
    assert!(matches!(
        ModeIndex::new(Parity::Odd, 0),
        Err(Error::InvalidIndex(_))
    ));
}

#[test]
fn ordering_interlaces() {
    // a_0 < b_1 < a_1 < b_2 < a_2 for q > 0.
    for q in [0.3, 3.0, 30.0] {
        let v = [
            mathieu::char_value(ModeIndex::even(0), q).unwrap(),
            mathieu::char_value(ModeIndex::odd(1), q).unwrap(),
            mathieu::char_value(ModeIndex::even(1), q).unwrap(),
            mathieu::char_value(ModeIndex::odd(2), q).unwrap(),
            mathieu::char_value(ModeIndex::even(2), q).unwrap(),
        ];
        assert!(v.windows(2).all(|w| w[0] < w[1]), "q={q}: {v:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn normalization_holds(index in parity_and_g(), q in 0.0f64..110.0) {
        let e = mathieu::expansion(index, real(q)).unwrap();
        let tol = 1e-12 * l1(&e).max(1.0);
        match index.parity() {
            Parity::Even => {
                prop_assert!((e.angular(0.0).re - 1.0).abs() < tol);
                prop_assert!(e.angular_prime(0.0).re.abs() < 1e-12);
                prop_assert!((e.mod_ce(0.0).unwrap().re - 1.0).abs() < 1e-12);
            }
            Parity::Odd => {
                prop_assert!(e.angular(0.0).re.abs() < 1e-12);
                prop_assert!((e.angular_prime(0.0).re - 1.0).abs() < 1e-12 * weighted_l1(&e).max(1.0));
                prop_assert!((e.mod_se_prime(0.0).unwrap().re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_q_reduces_to_trigonometric(g in 0u32..=13, alpha in -PI..PI) {
        let ce = mathieu::expansion(ModeIndex::even(g), real(0.0)).unwrap();
        prop_assert!((ce.ce(alpha).unwrap().re - (f64::from(g) * alpha).cos()).abs() < 1e-12);
        if g > 0 {
            let se = mathieu::expansion(ModeIndex::odd(g), real(0.0)).unwrap();
            let want = (f64::from(g) * alpha).sin() / f64::from(g);
            prop_assert!((se.se(alpha).unwrap().re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn angular_equation_residual(index in parity_and_g(), q in 0.5f64..110.0, alpha in 0.0f64..PI) {
        let e = mathieu::expansion(index, real(q)).unwrap();
        let a = e.char_value().re;
        let f = |x: f64| e.angular(x).re;
        let scale = (a.abs() + 2.0 * q) * l1(&e);
        let r = second_difference(f, alpha, 1e-3) + (a - 2.0 * q * (2.0 * alpha).cos()) * f(alpha);
        prop_assert!(r.abs() < 1e-7 * scale, "residual {r} scale {scale}");
    }

    #[test]
    fn radial_equation_residual(index in parity_and_g(), q in 0.5f64..110.0, frac in 0.05f64..1.0) {
        let e = mathieu::expansion(index, real(q)).unwrap();
        let a = e.char_value().re;
        let sol = e.radial_solution(0.8).unwrap();
        let r = |b: f64| sol.eval(b).unwrap().0.re;
        let b = 0.7 * frac;
        let mut scale = 0.0f64;
        for i in 0..=70 {
            let x = 0.01 * i as f64;
            scale = scale.max(((a - 2.0 * q * (2.0 * x).cosh()) * r(x)).abs());
        }
        let res = second_difference(r, b, 1e-3f64.min(b)) - (a - 2.0 * q * (2.0 * b).cosh()) * r(b);
        prop_assert!(res.abs() < 1e-7 * scale, "residual {res} scale {scale}");
    }

    #[test]
    fn series_and_integrator_agree_for_moderate_q(index in parity_and_g(), q in 0.1f64..8.0, beta in 0.0f64..0.7) {
        let e = mathieu::expansion(index, real(q)).unwrap();
        let series = e.radial_series(beta).unwrap().re;
        let ivp = e.radial_solution(0.7).unwrap().eval(beta).unwrap().0.re;
        prop_assert!((series - ivp).abs() < 1e-10 * series.abs().max(1.0), "{series} vs {ivp}");
    }

    #[test]
    fn analytic_continuation_is_consistent(index in parity_and_g(), q in 1.0f64..100.0) {
        let a_real = mathieu::char_value(index, q).unwrap();
        let a_cplx = mathieu::char_value_analytic(index, real(q), a_real).unwrap();
        prop_assert!((a_cplx.re - a_real).abs() < 1e-10 * a_real.abs().max(1.0));
        prop_assert!(a_cplx.im.abs() < 1e-12 * a_real.abs().max(1.0));
    }

    #[test]
    fn angular_functions_have_reflection_symmetry(index in parity_and_g(), q in 0.0f64..100.0, alpha in 0.0f64..PI) {
        let e = mathieu::expansion(index, real(q)).unwrap();
        let tol = 1e-12 * l1(&e).max(1.0);
        let (f, m) = (e.angular(alpha).re, e.angular(-alpha).re);
        let s = if index.parity() == Parity::Even { 1.0 } else { -1.0 };
        prop_assert!((m - s * f).abs() < tol);
        let p = e.angular(alpha + PI).re;
        let t = if index.g() % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((p - t * f).abs() < tol);
    }
}

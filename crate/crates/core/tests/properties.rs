//! Property-based invariants across modules.

use proptest::prelude::*;

use s3forms::ale::{classify_slope, decay_classify, AKForm, AKFormParams, ALEModel, DecayClass, End};
use s3forms::frame::{left_frame_at, right_frame_at, structure_residual, SpherePoint};
use s3forms::regularity::moser_product;
use s3forms::selfdual::{closedness_convergence, kato_ratio, SelfDualForm, TwoForm, KATO_BOUND};
use s3forms::spectral::eigen_decompose;

fn sphere_point() -> impl Strategy<Value = SpherePoint> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("away from zero", |c| c.iter().map(|v| v * v).sum::<f64>() > 1e-2)
        .prop_map(|c| SpherePoint::new(c).unwrap())
}

fn shell_point() -> impl Strategy<Value = [f64; 4]> {
    (sphere_point(), 0.6f64..1.8).prop_map(|(p, t)| p.coords().map(|v| v * t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frames_are_orthonormal(p in sphere_point()) {
        prop_assert!(left_frame_at(&p).orthonormality_residual() < 1e-12);
        prop_assert!(right_frame_at(&p).orthonormality_residual() < 1e-12);
        prop_assert!(structure_residual(&p) < 1e-12);
    }

    #[test]
    fn star_is_an_involution_with_unit_kahler_norms(c in prop::array::uniform6(-3.0f64..3.0)) {
        let w = TwoForm::from_upper(c);
        prop_assert!(w.star().star().upper().iter().zip(c).all(|(a, b)| (a - b).abs() < 1e-14));
        let sd = w.add(&w.star()).scale(0.5);
        prop_assert!(sd.self_duality_residual() < 1e-14);
    }

    #[test]
    fn rho_round_trip(eps in 1e-2f64..2.0, log_t in -4.0f64..4.0) {
        let m = ALEModel::new(eps).unwrap();
        let t = 10f64.powf(log_t);
        let back = m.t_of_rho(m.rho_of_t(t).unwrap()).unwrap();
        prop_assert!((back - t).abs() <= 1e-12 * t);
        prop_assert!(m.warped_identity_residual(t).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ricci_is_scalar_flat(eps in 0.05f64..1.0, p in sphere_point(), log_t in -1.0f64..2.0) {
        let m = ALEModel::new(eps).unwrap();
        let x = p.coords().map(|v| v * 10f64.powf(log_t));
        let scale = m.ricci_closed_form(&x).unwrap().amax().max(1e-300);
        prop_assert!(m.scalar_curvature(&x).unwrap().abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn ak_norm_matches_closed_form(alpha in -2.0f64..2.0, beta in -2.0f64..2.0, eps in 0.05f64..1.0, x in shell_point()) {
        let f = AKForm::new(AKFormParams { alpha, beta, epsilon: eps }).unwrap();
        let t = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let a = f.norm_sq(&x).unwrap();
        let b = f.norm_sq_closed(t, &x.map(|v| v / t));
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-12));
    }

    #[test]
    fn moser_is_monotone_in_c(c in 0.0f64..5.0, dc in 1e-3f64..1.0) {
        let a = moser_product(c, 60).unwrap();
        let b = moser_product(c + dc, 60).unwrap();
        prop_assert!(b.log_product > a.log_product);
        prop_assert!(a.partial_product >= 1.0);
    }

    #[test]
    fn classifier_thresholds(slope in -8.0f64..2.0) {
        let class = classify_slope(slope);
        match class {
            DecayClass::AsymptoticallyKahler => prop_assert!(slope.abs() < 0.1),
            DecayClass::FastDecay => prop_assert!(slope <= -3.5),
            DecayClass::Indeterminate => prop_assert!(slope.abs() >= 0.1 && slope > -3.5),
        }
    }

    #[test]
    fn power_law_profiles_recover_their_exponent(k in -6.0f64..0.0, c in 0.1f64..10.0) {
        let profile: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let r = -10.0 * 100f64.powf(i as f64 / 19.0);
                (r, c * r.abs().powf(k))
            })
            .collect();
        let rep = decay_classify(&profile).unwrap();
        prop_assert!((rep.exponent - k).abs() < 1e-9);
        prop_assert!((rep.coefficient / c - 1.0).abs() < 1e-9);
    }
}

#[test]
fn generated_forms_satisfy_the_pointwise_inequalities() {
    let spectrum = eigen_decompose(3).unwrap();
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(32));
    let coeffs = prop::collection::vec(-1.0f64..1.0, spectrum.modes.len());
    runner
        .run(&(coeffs, shell_point()), |(c, x)| {
            let terms: Vec<_> = spectrum.modes.iter().cloned().zip(c).collect();
            let form = SelfDualForm::from_modes(&terms);
            let r = closedness_convergence(&form, &x, &[1e-2, 5e-3, 2.5e-3]).unwrap();
            prop_assert!(r.second_order(), "{r:?}");
            if let Ok(k) = kato_ratio(&form, &x, 1e-3) {
                prop_assert!(k <= KATO_BOUND + 1e-6);
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn ak_forms_never_classify_as_indeterminate() {
    for (alpha, beta) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (-0.3, 2.0)] {
        let f = AKForm::new(AKFormParams { alpha, beta, epsilon: 0.1 }).unwrap();
        for end in [End::Plus, End::Minus] {
            let p = s3forms::ale::decay_profile(&f, end, 10.0, 1000.0, 30, &[0.0, 0.6, 0.0, 0.8]).unwrap();
            assert_ne!(decay_classify(&p).unwrap().classification, DecayClass::Indeterminate);
        }
    }
}

//! End-to-end: initial data on S³ → mode expansion → flow → self-dual form on ℝ⁴.

use s3forms::maxwell::{decompose_initial, evolve_in_time, propagate, InitialData, InitialTerm};
use s3forms::selfdual::{closedness_convergence, f_t_map, harmonic_residual, SelfDualForm};
use s3forms::spectral::{eigen_decompose, exact_spectrum};

fn initial() -> InitialData {
    // η¹ − ½η³, constant data in the λ = 2 eigenspace.
    let json = r#"{"schema_version":1,"terms":[
        {"monomial":[0,0,0,0],"axis":1,"coefficient":1.0},
        {"monomial":[0,0,0,0],"axis":3,"coefficient":-0.5}
    ]}"#;
    serde_json::from_str(json).unwrap()
}

#[test]
fn float_and_exact_spectra_agree() {
    for d in 0..=3 {
        let float = eigen_decompose(d).unwrap().report;
        let exact = exact_spectrum(d).unwrap();
        assert_eq!(float.modes, exact.modes, "D = {d}");
        assert_eq!(float.dimension, exact.dimension);
    }
}

#[test]
fn flow_of_initial_data_matches_the_series_form() {
    let spectrum = eigen_decompose(2).unwrap();
    let eta0 = [-2, 3, 4].iter().fold(initial().to_field().unwrap(), |acc, &l| {
        acc.add(&spectrum.first_mode(l).unwrap().field.scale(&0.3))
    });
    let exp = decompose_initial(&eta0, &spectrum.modes).unwrap();
    assert!(exp.reconstruction_residual < 1e-10);
    let at = propagate(&exp, 1.5).unwrap();
    let ode = evolve_in_time(&eta0, 1.0, 1.5, 200).unwrap();
    assert!(at.sub(&ode).l2_norm() < 1e-9);

    // Slicing the series form at |x| = t recovers t·η(t) through F_t.
    let form = SelfDualForm::from_expansion(&exp);
    let x = [0.9, -0.3, 0.6, 0.6];
    let t: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let xh = x.map(|v| v / t);
    let c = f_t_map(&form.eval(&x).unwrap(), &x).unwrap();
    let eta_t = propagate(&exp, t).unwrap().eval(&xh);
    for i in 0..3 {
        assert!((c[i] - t * eta_t[i]).abs() < 1e-10, "{i}: {} vs {}", c[i], t * eta_t[i]);
    }
    assert!(closedness_convergence(&form, &x, &[1e-2, 5e-3, 2.5e-3]).unwrap().second_order());
    let (coarse, fine) = (harmonic_residual(&form, &x, 2e-2).unwrap(), harmonic_residual(&form, &x, 1e-2).unwrap());
    assert!(fine < 1e-3, "{fine}");
    assert!((3.5..=4.5).contains(&(coarse / fine)), "{coarse} {fine}");
}

#[test]
fn inconsistent_initial_data_is_rejected() {
    let bad = InitialData {
        schema_version: 1,
        terms: vec![InitialTerm { monomial: [1, 0, 0, 0], axis: 1, coefficient: 1.0 }],
    };
    let eta0 = bad.to_field().unwrap();
    let spectrum = eigen_decompose(1).unwrap();
    assert!(decompose_initial(&eta0, &spectrum.modes).is_err());
}

//! The `spectrum`, `evolve`, `moser` and `decay` subcommands.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::json;

use s3forms::ale::{decay_classify, decay_profile, AKForm, AKFormParams, DecayClass, End};
use s3forms::maxwell::{decompose_initial, div_norm, evolve_in_time, propagate, InitialData};
use s3forms::poly::{operator_matrix, OperatorKind};
use s3forms::regularity::{moser_converged, moser_csv, moser_sweep};
use s3forms::scalar::Rational;
use s3forms::spectral::{eigen_decompose, exact_spectrum, SpectrumReport, CLUSTER_TOLERANCE};

use crate::report::{Checks, FailureRecord, Outcome};

/// Tolerance on eigen residuals and `div` of computed modes.
pub const MODE_RESIDUAL: f64 = 1e-8;

fn spectrum_checks(checks: &mut Checks, report: &SpectrumReport) {
    let input = json!({ "D": report.degree, "ring": report.ring });
    for v in report.violations() {
        checks.push(FailureRecord::new(
            "spectral",
            "eigen_decompose",
            &input,
            v,
            json!({ "gap": 2, "multiplicity": "λ²−1", "integer_deviation": CLUSTER_TOLERANCE }),
        ));
    }
    checks.at_most("spectral", "eigen_decompose", &input, report.residuals.max_eigen_residual, MODE_RESIDUAL);
    checks.at_most("spectral", "eigen_decompose", &input, report.residuals.max_div_residual, MODE_RESIDUAL);
    checks.at_most("spectral", "divergence_free_subspace", &input, report.residuals.invariance, 0.0);
}

pub fn spectrum(degree: u32, exact: bool, dump_operators: bool) -> Outcome {
    let parameters = json!({ "degree": degree, "exact": exact });
    let mut checks = Checks::default();
    let computed = if exact {
        exact_spectrum(degree)
    } else {
        eigen_decompose(degree).map(|s| s.report)
    };
    let result = match computed {
        Ok(report) => {
            spectrum_checks(&mut checks, &report);
            serde_json::to_value(&report).expect("spectrum report serializes")
        }
        Err(e) => {
            checks.push(FailureRecord::error("spectral", "eigen_decompose", &parameters, e));
            serde_json::Value::Null
        }
    };
    let mut artifacts = Vec::new();
    if dump_operators {
        for kind in [OperatorKind::Div, OperatorKind::Curl, OperatorKind::StarD] {
            let op = operator_matrix::<Rational>(kind, degree);
            artifacts.push((
                format!("{}_D{degree}.json", kind.name()),
                serde_json::to_string_pretty(&op.to_json()).expect("matrix serializes"),
            ));
            artifacts.push((format!("{}_D{degree}.csv", kind.name()), op.to_csv()));
        }
    }
    Outcome {
        parameters,
        result,
        failures: checks.failures,
        artifacts,
    }
}

pub fn load_initial_data(path: &Path) -> Result<InitialData, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("malformed initial data {}: {e}", path.display()))
}

/// Step-doubling order window for RK4.
pub const RK4_ORDER: (f64, f64) = (3.5, 4.5);
/// Below this the RK4 error is rounding and carries no order information.
pub const ROUNDING_FLOOR: f64 = 1e-11;

pub fn evolve(data: &InitialData, t0: f64, t1: f64, steps: usize) -> Outcome {
    let parameters = json!({ "t0": t0, "t1": t1, "steps": steps, "terms": data.terms.len() });
    let mut checks = Checks::default();
    let result = match evolve_inner(data, t0, t1, steps, &mut checks) {
        Ok(v) => v,
        Err(e) => {
            checks.push(FailureRecord::error("maxwell", "evolve", &parameters, e));
            serde_json::Value::Null
        }
    };
    Outcome {
        parameters,
        result,
        failures: checks.failures,
        artifacts: Vec::new(),
    }
}

fn evolve_inner(data: &InitialData, t0: f64, t1: f64, steps: usize, checks: &mut Checks) -> s3forms::Result<serde_json::Value> {
    let eta0 = data.to_field()?;
    let degree = eta0.degree();
    let input = json!({ "degree": degree, "t0": t0, "t1": t1 });
    let spectrum = eigen_decompose(degree)?;
    let exp = decompose_initial(&eta0, &spectrum.modes)?.with_reference_time(t0)?;
    checks.at_most("maxwell", "decompose_initial", &input, exp.reconstruction_residual, 1e-10);
    let spectral = propagate(&exp, t1)?;
    let scale = spectral.l2_norm().max(1e-300);
    let coarse = evolve_in_time(&eta0, t0, t1, steps)?.sub(&spectral).l2_norm() / scale;
    let fine = evolve_in_time(&eta0, t0, t1, 2 * steps)?.sub(&spectral).l2_norm() / scale;
    let order = if coarse > ROUNDING_FLOOR && fine > ROUNDING_FLOOR {
        let p = s3forms::fd::observed_order(coarse, fine);
        checks.within("maxwell", "evolve_ode", &input, p, RK4_ORDER.0, RK4_ORDER.1);
        Some(p)
    } else {
        None
    };
    let components: BTreeMap<String, f64> = exp
        .components(1e-12)
        .into_iter()
        .map(|(lambda, f)| (lambda.to_string(), f.l2_norm()))
        .collect();
    Ok(json!({
        "degree": degree,
        "initial_norm": eta0.l2_norm(),
        "initial_div_norm": div_norm(&eta0),
        "reconstruction_residual": exp.reconstruction_residual,
        "component_norms_at_t0": components,
        "final_norm": spectral.l2_norm(),
        "relative_difference": { "steps": coarse, "double_steps": fine },
        "observed_order": order,
    }))
}

/// `ratio(c)` must approach 1 from above as `c → 0`.
pub const SMALL_C: f64 = 1e-6;
pub const SMALL_C_RATIO_MAX: f64 = 1.0 + 1e-4;

pub fn moser(c_min: f64, c_max: f64, points: usize) -> Outcome {
    let parameters = json!({ "c_min": c_min, "c_max": c_max, "points": points });
    let mut checks = Checks::default();
    let mut artifacts = Vec::new();
    let sweep = match moser_sweep(c_min, c_max, points) {
        Ok(rows) => {
            artifacts.push(("moser.csv".to_string(), moser_csv(&rows)));
            serde_json::to_value(&rows).expect("sweep serializes")
        }
        Err(e) => {
            checks.push(FailureRecord::error("regularity", "moser_product", &parameters, e));
            serde_json::Value::Null
        }
    };
    let small = moser_converged(SMALL_C).expect("small c is valid");
    checks.within("regularity", "moser_product", json!({ "c": SMALL_C }), small.ratio, 1.0, SMALL_C_RATIO_MAX);
    let exceeded = sweep
        .as_array()
        .map_or(0, |rows| rows.iter().filter(|r| r["ratio"].as_f64().unwrap_or(0.0) > 1.0).count());
    Outcome {
        parameters,
        result: json!({
            "small_c_limit": small,
            "sweep": sweep,
            "points_above_bound": exceeded,
            "note": "ratio > 1 means the product exceeds e^c; reported as data, not asserted",
        }),
        failures: checks.failures,
        artifacts,
    }
}

/// `|ρ|` range and sample count of decay profiles.
pub const DECAY_RANGE: (f64, f64) = (10.0, 1000.0);
pub const DECAY_SAMPLES: usize = 30;
/// Direction `x̂` along which profiles are taken.
pub const DECAY_DIRECTION: [f64; 4] = [1.0, 0.0, 0.0, 0.0];

pub fn decay_end(form: &AKForm, end: End) -> s3forms::Result<(Vec<(f64, f64)>, s3forms::ale::DecayReport)> {
    let profile = decay_profile(form, end, DECAY_RANGE.0, DECAY_RANGE.1, DECAY_SAMPLES, &DECAY_DIRECTION)?;
    let report = decay_classify(&profile)?;
    Ok((profile, report))
}

pub fn profile_csv(profile: &[(f64, f64)]) -> String {
    let mut s = String::from("rho,norm\n");
    for (r, w) in profile {
        s.push_str(&format!("{r:.12e},{w:.12e}\n"));
    }
    s
}

pub fn decay(params: AKFormParams, end: End) -> Outcome {
    let parameters = json!({
        "params": params,
        "end": end,
        "rho_range": DECAY_RANGE,
        "samples": DECAY_SAMPLES,
        "direction": DECAY_DIRECTION,
    });
    let mut checks = Checks::default();
    let mut artifacts = Vec::new();
    let result = match AKForm::new(params).and_then(|f| decay_end(&f, end)) {
        Ok((profile, report)) => {
            if report.classification == DecayClass::Indeterminate {
                checks.push(FailureRecord::new(
                    "ale_models",
                    "decay_classify",
                    &parameters,
                    report.exponent,
                    json!({ "kahler": "|slope| < 0.1", "fast_decay": "slope ≤ −3.5" }),
                ));
            }
            let name = match end {
                End::Plus => "decay_plus.csv",
                End::Minus => "decay_minus.csv",
            };
            artifacts.push((name.to_string(), profile_csv(&profile)));
            serde_json::to_value(&report).expect("decay report serializes")
        }
        Err(e) => {
            checks.push(FailureRecord::error("ale_models", "decay_classify", &parameters, e));
            serde_json::Value::Null
        }
    };
    Outcome {
        parameters,
        result,
        failures: checks.failures,
        artifacts,
    }
}

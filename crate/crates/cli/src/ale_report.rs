//! The `ale-report` subcommand.

use std::f64::consts::PI;

use serde_json::{json, Value};

use s3forms::ale::{
    boundary_energy, grad_energy_boundary, volume_energy, AKForm, AKFormParams, ALEModel, DecayClass, End,
};
use s3forms::sampling::Sampler;

use crate::commands::{decay_end, profile_csv, DECAY_DIRECTION};
use crate::report::{Checks, FailureRecord, Outcome};

pub const RICCI_SAMPLES: usize = 100;
pub const RICCI_H: f64 = 1e-3;
pub const RICCI_TOLERANCE: f64 = 1e-4;
pub const RICCI_NORM_TOLERANCE: f64 = 1e-10;
pub const SCALAR_TOLERANCE: f64 = 1e-10;
/// Ricci samples are drawn from the neck band `|ρ| ≤ RICCI_SPAN·ε`, over
/// which `|Ric|²` falls by a factor 16 from its maximum.
pub const RICCI_SPAN: f64 = 2.0;

pub const ASYMPTOTIC_DIRECTIONS: usize = 24;
/// `| |ω|² − leading | ≤ ASYMPTOTIC_BOUND·ρ⁻²`.
pub const ASYMPTOTIC_BOUND: f64 = 10.0;

pub const ENERGY_A: f64 = 10.0;
pub const VOLUME_PANELS: usize = 40;
pub const ORACLE_TOLERANCE: f64 = 0.01;

pub const PROFILE_POINTS: usize = 201;

fn ricci_check(model: &ALEModel, seed: u64, checks: &mut Checks) -> Value {
    let eps = model.epsilon();
    let mut s = Sampler::new(seed);
    let (mut rel, mut norm_err, mut scalar) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..RICCI_SAMPLES {
        let rho = s.uniform(-RICCI_SPAN * eps, RICCI_SPAN * eps);
        let dir = s.sphere_point().coords();
        let run = || -> s3forms::Result<(f64, f64, f64)> {
            let t = model.t_of_rho(rho)?;
            let x = dir.map(|v| v * t);
            let cf = model.ricci_closed_form(&x)?;
            let num = model.ricci_numeric(&x, RICCI_H)?;
            let want = model.ricci_norm_sq_formula(rho);
            Ok((
                (num - cf).amax() / cf.amax(),
                (model.ricci_norm_sq(&x)? - want).abs() / want,
                model.scalar_curvature(&x)?.abs(),
            ))
        };
        match run() {
            Ok((a, b, c)) => {
                rel = rel.max(a);
                norm_err = norm_err.max(b);
                scalar = scalar.max(c);
            }
            Err(e) => checks.push(FailureRecord::error("ale_models", "ricci_numeric", json!({ "rho": rho, "direction": dir }), e)),
        }
    }
    let input = json!({ "epsilon": eps, "samples": RICCI_SAMPLES, "h": RICCI_H, "seed": seed });
    checks.at_most("ale_models", "ricci_numeric", &input, rel, RICCI_TOLERANCE);
    checks.at_most("ale_models", "ricci_closed_form", &input, norm_err, RICCI_NORM_TOLERANCE);
    checks.at_most("ale_models", "ricci_closed_form", &input, scalar, SCALAR_TOLERANCE);
    json!({
        "samples": RICCI_SAMPLES,
        "rho_range": [-RICCI_SPAN * eps, RICCI_SPAN * eps],
        "h": RICCI_H,
        "max_relative_error": rel,
        "max_norm_formula_error": norm_err,
        "max_scalar_curvature": scalar,
    })
}

fn end_asymptotics(form: &AKForm, end: End, rho: f64, seed: u64, checks: &mut Checks) -> Value {
    let p = form.params;
    let (rho, leading, decaying) = match end {
        End::Plus => (rho, p.alpha * p.alpha, p.beta),
        End::Minus => (-rho, p.beta * p.beta, p.alpha),
    };
    let mut s = Sampler::new(seed);
    let (mut dev, mut env_lo, mut env_hi) = (0.0f64, f64::INFINITY, f64::NEG_INFINITY);
    // Envelope of the decaying coefficient, c²ε⁸ρ⁻⁸.
    let envelope = decaying * decaying * p.epsilon.powi(8) * rho.powi(-8);
    for _ in 0..ASYMPTOTIC_DIRECTIONS {
        let d = s.sphere_point().coords();
        match form.norm_sq_at_rho(rho, &d) {
            Ok(n) => {
                dev = dev.max((n - leading).abs());
                if leading == 0.0 && envelope > 0.0 {
                    env_lo = env_lo.min(n / envelope);
                    env_hi = env_hi.max(n / envelope);
                }
            }
            Err(e) => checks.push(FailureRecord::error("ale_models", "ak_form_eval", json!({ "rho": rho }), e)),
        }
    }
    let scaled = dev * rho * rho;
    checks.at_most(
        "ale_models",
        "ak_form_eval",
        json!({ "end": end, "rho": rho, "params": p }),
        scaled,
        ASYMPTOTIC_BOUND,
    );
    let envelope_ratio = if env_lo.is_finite() { json!([env_lo, env_hi]) } else { Value::Null };
    json!({
        "rho": rho,
        "leading": leading,
        "max_abs_deviation": dev,
        "deviation_times_rho_squared": scaled,
        "bound": ASYMPTOTIC_BOUND,
        "decaying_envelope_ratio": envelope_ratio,
    })
}

fn energy(form: &AKForm, checks: &mut Checks) -> Value {
    let p = form.params;
    let input = json!({ "params": p, "A": ENERGY_A });
    let estimate = match grad_energy_boundary(p, ENERGY_A) {
        Ok(e) => e,
        Err(e) => {
            checks.push(FailureRecord::error("ale_models", "grad_energy_boundary", &input, e));
            return Value::Null;
        }
    };
    if !estimate.stable {
        checks.push(FailureRecord::new("ale_models", "grad_energy_boundary", &input, estimate.values, "stable Richardson extrapolation"));
    }
    let oracle = boundary_energy(form, ENERGY_A).and_then(|b| Ok((b, volume_energy(form, ENERGY_A, VOLUME_PANELS)?)));
    let oracle = match oracle {
        Ok((b, v)) => {
            let rel = if b == 0.0 && v == 0.0 { 0.0 } else { (b - v).abs() / b.abs().max(v.abs()) };
            checks.at_most("ale_models", "grad_energy_boundary", &input, rel, ORACLE_TOLERANCE);
            json!({ "A": ENERGY_A, "boundary": b, "volume": v, "relative_difference": rel })
        }
        Err(e) => {
            checks.push(FailureRecord::error("ale_models", "volume_energy", &input, e));
            Value::Null
        }
    };
    let e2 = p.epsilon * p.epsilon;
    let boundary_value = 16.0 * PI * PI * p.alpha * p.alpha * e2;
    let stated_value = 18.0 * PI * PI * e2;
    let agrees = |v: f64| (estimate.limit - v).abs() <= ORACLE_TOLERANCE * v.abs().max(1e-300);
    json!({
        "estimate": estimate,
        "volume_oracle": oracle,
        "constant_over_pi2_eps2": estimate.limit / (PI * PI * e2),
        "published_boundary_value": { "formula": "8|S³|α²ε²", "value": boundary_value, "agrees": agrees(boundary_value) },
        "published_stated_value": { "formula": "18π²ε²", "value": stated_value, "agrees": agrees(stated_value) },
    })
}

fn decay(form: &AKForm, checks: &mut Checks, artifacts: &mut Vec<(String, String)>) -> Value {
    let mut out = serde_json::Map::new();
    for (end, key) in [(End::Plus, "plus_end"), (End::Minus, "minus_end")] {
        let v = match decay_end(form, end) {
            Ok((profile, report)) => {
                if report.classification == DecayClass::Indeterminate {
                    checks.push(FailureRecord::new(
                        "ale_models",
                        "decay_classify",
                        json!({ "end": end, "params": form.params }),
                        report.exponent,
                        json!({ "kahler": "|slope| < 0.1", "fast_decay": "slope ≤ −3.5" }),
                    ));
                }
                artifacts.push((format!("decay_{key}.csv"), profile_csv(&profile)));
                serde_json::to_value(report).expect("serializes")
            }
            Err(e) => {
                checks.push(FailureRecord::error("ale_models", "decay_classify", json!({ "end": end }), e));
                Value::Null
            }
        };
        out.insert(key.into(), v);
    }
    Value::Object(out)
}

/// `(ρ, |ω|², |Ric|²)` on a sinh-spaced grid of `[−R, R]`.
pub fn profile(form: &AKForm, rho_max: f64) -> s3forms::Result<String> {
    let mut s = String::from("rho,omega_norm_sq,ricci_norm_sq\n");
    let top = rho_max.asinh();
    for k in 0..PROFILE_POINTS {
        let rho = (-top + 2.0 * top * k as f64 / (PROFILE_POINTS - 1) as f64).sinh();
        let w = form.norm_sq_at_rho(rho, &DECAY_DIRECTION)?;
        let r = form.model.ricci_norm_sq_formula(rho);
        s.push_str(&format!("{rho:.12e},{w:.12e},{r:.12e}\n"));
    }
    Ok(s)
}

pub fn run(params: AKFormParams, rho_max: f64, seed: u64) -> Outcome {
    let parameters = json!({
        "params": params,
        "rho_max": rho_max,
        "omega_plus_two": "Kähler form of the left-invariant η¹",
        "omega_minus_two": "t⁻⁴-weighted form of the right-invariant unit 1-form f¹",
    });
    let mut checks = Checks::default();
    let mut artifacts = Vec::new();
    let form = match AKForm::new(params) {
        Ok(f) => f,
        Err(e) => {
            checks.push(FailureRecord::error("ale_models", "ak_form_eval", &parameters, e));
            return Outcome { parameters, result: Value::Null, failures: checks.failures, artifacts };
        }
    };
    let ricci = ricci_check(&form.model, seed, &mut checks);
    let asymptotics = json!({
        "plus_end": end_asymptotics(&form, End::Plus, rho_max, seed, &mut checks),
        "minus_end": end_asymptotics(&form, End::Minus, rho_max, seed, &mut checks),
    });
    let energy = energy(&form, &mut checks);
    let decay = decay(&form, &mut checks, &mut artifacts);
    match profile(&form, rho_max) {
        Ok(csv) => artifacts.push(("ale_profile.csv".into(), csv)),
        Err(e) => checks.push(FailureRecord::error("ale_models", "ak_form_eval", &parameters, e)),
    }
    let result = json!({
        "epsilon": params.epsilon,
        "alpha": params.alpha,
        "beta": params.beta,
        "ricci_check": ricci,
        "asymptotics": asymptotics,
        "energy": energy,
        "decay": decay,
    });
    Outcome {
        parameters,
        result,
        failures: checks.failures,
        artifacts,
    }
}

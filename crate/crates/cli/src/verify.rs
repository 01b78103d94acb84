//! The `verify` subcommand targets.

use serde_json::{json, Value};

use s3forms::frame::{hodge_star_s3, left_frame_at, right_frame_at, structure_residual};
use s3forms::maxwell::{decompose_initial, evolve_ode, propagate};
use s3forms::poly::CoframeField;
use s3forms::regularity::sqrt_elliptic_check;
use s3forms::sampling::Sampler;
use s3forms::selfdual::{
    ball_orthogonality, closedness_convergence, coframe_residual, kato_ratio, l2_shell_orthogonality,
    shell_pairing_quadrature, SelfDualForm, KATO_BOUND,
};
use s3forms::spectral::{constant_norm_check, eigen_decompose, hodge_laplacian_check, Spectrum};
use s3forms::Error;

use crate::report::{Checks, FailureRecord, Outcome};

pub const FRAME_TOLERANCE: f64 = 1e-12;
pub const NORM_SPREAD_TOLERANCE: f64 = 1e-10;
pub const SQUARE_TOLERANCE: f64 = 1e-8;
pub const KATO_SLACK: f64 = 1e-6;
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;
pub const CLOSEDNESS_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
/// Sampling shell for pointwise checks on ℝ⁴.
pub const SHELL: (f64, f64) = (0.5, 2.0);

fn outcome(parameters: Value, result: Value, checks: Checks) -> Outcome {
    Outcome {
        parameters,
        result,
        failures: checks.failures,
        artifacts: Vec::new(),
    }
}

fn spectrum_or_fail(degree: u32, checks: &mut Checks) -> Option<Spectrum> {
    match eigen_decompose(degree) {
        Ok(s) => Some(s),
        Err(e) => {
            checks.push(FailureRecord::error("spectral", "eigen_decompose", json!({ "D": degree }), e));
            None
        }
    }
}

pub fn frames(samples: usize, seed: u64) -> Outcome {
    let parameters = json!({ "target": "frames", "samples": samples });
    let mut checks = Checks::default();
    let mut s = Sampler::new(seed);
    let (mut left, mut right, mut structure, mut star, mut coframe) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let p = s.sphere_point();
        left = left.max(left_frame_at(&p).orthonormality_residual());
        right = right.max(right_frame_at(&p).orthonormality_residual());
        structure = structure.max(structure_residual(&p));
        let a = s.unit_cube3();
        let back = hodge_star_s3(hodge_star_s3(a, 1).expect("degree 1"), 2).expect("degree 2");
        star = star.max(a.iter().zip(back).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
        let x = s.shell_point(SHELL.0, SHELL.1);
        coframe = coframe.max(coframe_residual(&x).unwrap_or(f64::INFINITY));
    }
    let input = json!({ "samples": samples });
    checks.at_most("frame_calculus", "left_frame_at", &input, left, FRAME_TOLERANCE);
    checks.at_most("frame_calculus", "right_frame_at", &input, right, FRAME_TOLERANCE);
    checks.at_most("frame_calculus", "structure_residual", &input, structure, FRAME_TOLERANCE);
    checks.at_most("frame_calculus", "hodge_star_s3", &input, star, FRAME_TOLERANCE);
    checks.at_most("self_dual_r4", "coframe_residual", &input, coframe, FRAME_TOLERANCE);
    let result = json!({
        "max_left_orthonormality": left,
        "max_right_orthonormality": right,
        "max_structure_residual": structure,
        "max_star_involution": star,
        "max_coframe_residual": coframe,
    });
    outcome(parameters, result, checks)
}

pub fn hodge(degree: u32, samples: usize, seed: u64) -> Outcome {
    let parameters = json!({ "target": "hodge", "degree": degree, "samples": samples });
    let mut checks = Checks::default();
    let laplacian = match hodge_laplacian_check(degree) {
        Ok(r) => {
            let input = json!({ "D": degree });
            checks.at_most("spectral", "hodge_laplacian_check", &input, r.max_square_deviation, SQUARE_TOLERANCE);
            checks.at_most("spectral", "hodge_laplacian_check", &input, 4.0 - r.min_eigenvalue, SQUARE_TOLERANCE);
            if let Some(w) = r.trusted_window {
                let want: Vec<i64> = (2..=w as i64).map(|l| l * l).collect();
                if r.window_eigenvalues() != want {
                    checks.push(FailureRecord::new(
                        "spectral",
                        "hodge_laplacian_check",
                        &input,
                        r.window_eigenvalues(),
                        want,
                    ));
                }
            }
            serde_json::to_value(&r).expect("serializes")
        }
        Err(e) => {
            checks.push(FailureRecord::error("spectral", "hodge_laplacian_check", json!({ "D": degree }), e));
            Value::Null
        }
    };
    // Constant pointwise norm of the λ = ±2 modes, with λ = 3 as contrast.
    let mut spreads = Vec::new();
    if let Some(sp) = spectrum_or_fail(2, &mut checks) {
        for mode in sp.modes.iter().filter(|m| m.lambda_int.abs() == 2 || m.lambda_int == 3) {
            let n = constant_norm_check(mode, samples, seed);
            if mode.lambda_int.abs() == 2 {
                checks.at_most(
                    "spectral",
                    "constant_norm_check",
                    json!({ "lambda": n.lambda, "samples": samples }),
                    n.spread,
                    NORM_SPREAD_TOLERANCE,
                );
            }
            spreads.push(n);
        }
    }
    let result = json!({ "hodge_laplacian": laplacian, "norm_spreads": spreads });
    outcome(parameters, result, checks)
}

/// Forms used by the pointwise sweeps, with their report names.
pub fn test_forms(spectrum: &Spectrum) -> Vec<(String, SelfDualForm)> {
    let mut out = vec![
        ("anti_kahler".to_string(), SelfDualForm::anti_kahler(0)),
        (
            "kahler_plus_anti_kahler".to_string(),
            SelfDualForm::kahler(0).plus(SelfDualForm::anti_kahler(1)),
        ),
    ];
    for lambda in [-3, 3, 4] {
        if let Some(m) = spectrum.first_mode(lambda) {
            out.push((format!("mode_{lambda}"), SelfDualForm::from_mode(m)));
        }
    }
    if let (Some(a), Some(b)) = (spectrum.first_mode(3), spectrum.first_mode(-3)) {
        let mixed = SelfDualForm::kahler(2)
            .plus(SelfDualForm::from_mode(a))
            .plus(SelfDualForm::from_mode(b).scaled(0.5));
        out.push(("mixed_series".to_string(), mixed));
    }
    out
}

pub fn kato(samples: usize, h: f64, seed: u64) -> Outcome {
    let parameters = json!({ "target": "kato", "samples": samples, "h": h, "shell": SHELL });
    let mut checks = Checks::default();
    let Some(spectrum) = spectrum_or_fail(3, &mut checks) else {
        return outcome(parameters, Value::Null, checks);
    };
    let mut kato_rows = Vec::new();
    for (name, form) in test_forms(&spectrum) {
        let mut s = Sampler::new(seed);
        let (mut max, mut valid, mut skipped) = (0.0f64, 0usize, 0usize);
        let mut attempts = 0;
        while valid < samples && attempts < 20 * samples {
            attempts += 1;
            let x = s.shell_point(SHELL.0, SHELL.1);
            match kato_ratio(&form, &x, h) {
                Ok(r) => {
                    valid += 1;
                    if r > max {
                        max = r;
                    }
                    checks.at_most("self_dual_r4", "kato_ratio", json!({ "form": name, "x": x }), r, KATO_BOUND + KATO_SLACK);
                }
                Err(Error::NearZero(_)) | Err(Error::ConstantForm) => skipped += 1,
                Err(e) => checks.push(FailureRecord::error("self_dual_r4", "kato_ratio", json!({ "form": name, "x": x }), e)),
            }
        }
        if valid < samples {
            checks.push(FailureRecord::new("self_dual_r4", "kato_ratio", json!({ "form": name }), valid, samples));
        }
        kato_rows.push(json!({ "form": name, "samples": valid, "skipped": skipped, "max_ratio": max }));
    }
    // Closedness of every generated series form.
    let mut s = Sampler::new(seed);
    let points: Vec<[f64; 4]> = (0..5).map(|_| s.shell_point(SHELL.0, SHELL.1)).collect();
    let (mut exact, mut second_order, mut worst_ratio) = (0usize, 0usize, (f64::INFINITY, f64::NEG_INFINITY));
    for mode in &spectrum.modes {
        let form = SelfDualForm::from_mode(mode);
        for x in &points {
            match closedness_convergence(&form, x, &CLOSEDNESS_STEPS) {
                Ok(r) if r.exact => exact += 1,
                Ok(r) => {
                    for q in &r.ratios {
                        worst_ratio = (worst_ratio.0.min(*q), worst_ratio.1.max(*q));
                    }
                    if r.second_order() {
                        second_order += 1;
                    } else {
                        checks.push(FailureRecord::new(
                            "self_dual_r4",
                            "d_residual",
                            json!({ "lambda": mode.lambda_int, "x": x, "steps": CLOSEDNESS_STEPS }),
                            r.ratios,
                            [3.5, 4.5],
                        ));
                    }
                }
                Err(e) => checks.push(FailureRecord::error("self_dual_r4", "d_residual", json!({ "lambda": mode.lambda_int, "x": x }), e)),
            }
        }
    }
    let ratio_range = if worst_ratio.0.is_finite() { json!([worst_ratio.0, worst_ratio.1]) } else { Value::Null };
    let result = json!({
        "kato_bound": KATO_BOUND,
        "kato": kato_rows,
        "closedness": {
            "forms": spectrum.modes.len(),
            "points": points.len(),
            "steps": CLOSEDNESS_STEPS,
            "stencil_exact": exact,
            "second_order": second_order,
            "ratio_range": ratio_range,
        },
    });
    outcome(parameters, result, checks)
}

/// Shell radii for the pairing checks.
pub const SHELL_RADII: [f64; 3] = [0.5, 1.0, 2.0];

pub fn orthogonality(degree: u32) -> Outcome {
    let parameters = json!({ "target": "orthogonality", "degree": degree, "radii": SHELL_RADII });
    let mut checks = Checks::default();
    let Some(spectrum) = spectrum_or_fail(degree, &mut checks) else {
        return outcome(parameters, Value::Null, checks);
    };
    let modes = &spectrum.modes;
    let (mut exact_max, mut pairs) = (0.0f64, 0usize);
    for i in 0..modes.len() {
        for j in i + 1..modes.len() {
            if modes[i].lambda_int == modes[j].lambda_int {
                continue;
            }
            pairs += 1;
            for t in SHELL_RADII {
                let v = l2_shell_orthogonality(&modes[i], &modes[j], t).abs();
                exact_max = exact_max.max(v);
                checks.at_most(
                    "self_dual_r4",
                    "l2_shell_orthogonality",
                    json!({ "lambdas": [modes[i].lambda_int, modes[j].lambda_int], "t": t }),
                    v,
                    ORTHOGONALITY_TOLERANCE,
                );
            }
        }
    }
    // Quadrature and ball oracles on one representative per eigenvalue.
    let mut reps: Vec<_> = Vec::new();
    for m in modes {
        if !reps.iter().any(|r: &&s3forms::spectral::SpectralMode| r.lambda_int == m.lambda_int) {
            reps.push(m);
        }
    }
    let (mut quad_max, mut ball_max) = (0.0f64, 0.0f64);
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            let input = json!({ "lambdas": [reps[i].lambda_int, reps[j].lambda_int] });
            match shell_pairing_quadrature(reps[i], reps[j], 1.0).and_then(|q| Ok((q, ball_orthogonality(reps[i], reps[j], 1.0)?))) {
                Ok((q, b)) => {
                    quad_max = quad_max.max(q.abs());
                    ball_max = ball_max.max(b.abs());
                    checks.at_most("self_dual_r4", "shell_pairing_quadrature", &input, q.abs(), ORTHOGONALITY_TOLERANCE);
                    checks.at_most("self_dual_r4", "ball_orthogonality", &input, b.abs(), ORTHOGONALITY_TOLERANCE);
                }
                Err(e) => checks.push(FailureRecord::error("self_dual_r4", "shell_pairing_quadrature", input, e)),
            }
        }
    }
    let evolution = evolution_cross_check(&mut checks);
    let result = json!({
        "pairs": pairs,
        "max_shell_pairing": exact_max,
        "max_quadrature_pairing": quad_max,
        "max_ball_pairing": ball_max,
        "evolution": evolution,
    });
    outcome(parameters, result, checks)
}

/// Step counts for the RK4 step-doubling check.
pub const EVOLUTION_STEPS: [usize; 2] = [32, 64];

/// `‖evolve_ode − propagate‖` at two step counts for a sum of D = 2 modes.
pub fn evolution_cross_check(checks: &mut Checks) -> Value {
    let Some(sp) = spectrum_or_fail(2, checks) else {
        return Value::Null;
    };
    let eta0 = sp.modes.iter().fold(CoframeField::zero(), |acc, m| acc.add(&m.field));
    let span = 2f64.ln();
    let run = || -> s3forms::Result<(f64, f64)> {
        let exp = decompose_initial(&eta0, &sp.modes)?;
        let target = propagate(&exp, 2.0)?;
        let err = |n| evolve_ode(&eta0, 0.0, span, n).map(|f| f.sub(&target).l2_norm());
        Ok((err(EVOLUTION_STEPS[0])?, err(EVOLUTION_STEPS[1])?))
    };
    match run() {
        Ok((coarse, fine)) => {
            let order = s3forms::fd::observed_order(coarse, fine);
            checks.within("maxwell", "evolve_ode", json!({ "steps": EVOLUTION_STEPS }), order, 3.5, 4.5);
            json!({ "steps": EVOLUTION_STEPS, "errors": [coarse, fine], "observed_order": order })
        }
        Err(e) => {
            checks.push(FailureRecord::error("maxwell", "evolve_ode", json!({ "steps": EVOLUTION_STEPS }), e));
            Value::Null
        }
    }
}

pub fn elliptic(samples: usize, h: f64, seed: u64) -> Outcome {
    let parameters = json!({ "target": "elliptic", "samples": samples, "h": h, "shell": SHELL });
    let mut checks = Checks::default();
    let forms = [
        ("anti_kahler", SelfDualForm::anti_kahler(0)),
        ("kahler", SelfDualForm::kahler(0)),
        ("mixed", SelfDualForm::kahler(0).plus(SelfDualForm::anti_kahler(0).scaled(0.05))),
    ];
    let mut rows = Vec::new();
    for (name, form) in forms {
        let mut s = Sampler::new(seed);
        let (mut min, mut worst_margin) = (f64::INFINITY, f64::INFINITY);
        for _ in 0..samples {
            let x = s.shell_point(SHELL.0, SHELL.1);
            match sqrt_elliptic_check(&form, &x, h) {
                Ok(c) => {
                    min = min.min(c.laplacian);
                    worst_margin = worst_margin.min(c.laplacian + c.tolerance);
                    if !c.passes() {
                        checks.push(FailureRecord::new(
                            "regularity",
                            "sqrt_elliptic_check",
                            json!({ "form": name, "x": x, "h": h }),
                            c.laplacian,
                            -c.tolerance,
                        ));
                    }
                }
                Err(e) => checks.push(FailureRecord::error("regularity", "sqrt_elliptic_check", json!({ "form": name, "x": x }), e)),
            }
        }
        rows.push(json!({ "form": name, "min_laplacian": min, "min_margin": worst_margin }));
    }
    outcome(parameters, json!({ "forms": rows }), checks)
}

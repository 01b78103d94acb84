//! The Euclidean–Maxwell flow `div η = 0`, `t ∂_t η = curl η` on S³.
//!
//! Two independent paths: the spectral propagator `Σ C_λ (t/t₀)^{λ−2} η_λ`
//! and classical RK4 in `u = log t` on the polynomial coefficients.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::poly::{make_basis, operator_matrix, CoframeField, Monomial, OperatorKind, PolyScalar};
use crate::spectral::SpectralMode;

/// L² tolerance on `div η₀` for evolution inputs.
pub const DIV_TOLERANCE: f64 = 1e-8;

/// L² norm of `div η`.
pub fn div_norm(eta: &CoframeField<f64>) -> f64 {
    let d = eta.div();
    d.l2_pairing_pi2(&d).max(0.0).sqrt() * std::f64::consts::PI
}

fn require_divergence_free(eta: &CoframeField<f64>) -> Result<()> {
    let r = div_norm(eta);
    if r > DIV_TOLERANCE {
        return Err(Error::NotDivergenceFree {
            residual: r,
            tolerance: DIV_TOLERANCE,
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ModeExpansion {
    pub t0: f64,
    pub terms: Vec<(SpectralMode, f64)>,
    /// `‖η₀ − Σ C_λ η_λ‖_{L²}` at construction.
    pub reconstruction_residual: f64,
}

/// Coefficients `C_λ = ⟨η₀, η_λ⟩` against an orthonormal mode list.
pub fn decompose_initial(eta0: &CoframeField<f64>, modes: &[SpectralMode]) -> Result<ModeExpansion> {
    require_divergence_free(eta0)?;
    let terms: Vec<(SpectralMode, f64)> = modes
        .iter()
        .map(|m| (m.clone(), eta0.inner(&m.field)))
        .collect();
    let mut exp = ModeExpansion {
        t0: 1.0,
        terms,
        reconstruction_residual: 0.0,
    };
    exp.reconstruction_residual = eta0.sub(&exp.field_at_t0()).l2_norm();
    Ok(exp)
}

impl ModeExpansion {
    pub fn with_reference_time(mut self, t0: f64) -> Result<Self> {
        if t0 <= 0.0 {
            return Err(Error::NonPositiveTime(t0));
        }
        self.t0 = t0;
        Ok(self)
    }

    fn field_at_t0(&self) -> CoframeField<f64> {
        self.terms
            .iter()
            .fold(CoframeField::zero(), |acc, (m, c)| acc.add(&m.field.scale(c)))
    }

    /// Projections onto each eigenspace with a nonzero component.
    pub fn components(&self, threshold: f64) -> BTreeMap<i64, CoframeField<f64>> {
        let mut out: BTreeMap<i64, CoframeField<f64>> = BTreeMap::new();
        for (m, c) in &self.terms {
            if c.abs() <= threshold {
                continue;
            }
            let e = out.entry(m.lambda_int).or_insert_with(CoframeField::zero);
            *e = e.add(&m.field.scale(c));
        }
        out
    }
}

/// `Σ C_λ (t/t₀)^{λ−2} η_λ`.
pub fn propagate(exp: &ModeExpansion, t: f64) -> Result<CoframeField<f64>> {
    if t <= 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let r = t / exp.t0;
    Ok(exp.terms.iter().fold(CoframeField::zero(), |acc, (m, c)| {
        acc.add(&m.field.scale(&(c * r.powf(m.lambda - 2.0))))
    }))
}

/// RK4 for `dη/du = curl η` over `[u0, u1]`.
pub fn evolve_ode(eta0: &CoframeField<f64>, u0: f64, u1: f64, steps: usize) -> Result<CoframeField<f64>> {
    if steps == 0 {
        return Err(Error::NoSteps);
    }
    require_divergence_free(eta0)?;
    let basis = make_basis(eta0.degree());
    let curl = operator_matrix::<f64>(OperatorKind::Curl, basis.degree()).matrix;
    let y = rk4(&curl, eta0.to_vector(&basis), u1 - u0, steps);
    Ok(CoframeField::from_vector(&basis, &y))
}

/// The same flow in the time variable, `t ∂_t η = curl η`.
pub fn evolve_in_time(eta0: &CoframeField<f64>, t0: f64, t1: f64, steps: usize) -> Result<CoframeField<f64>> {
    for t in [t0, t1] {
        if t <= 0.0 {
            return Err(Error::NonPositiveTime(t));
        }
    }
    evolve_ode(eta0, t0.ln(), t1.ln(), steps)
}

fn rk4(a: &DenseMatrix<f64>, mut y: Vec<f64>, span: f64, steps: usize) -> Vec<f64> {
    let h = span / steps as f64;
    let axpy = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    for _ in 0..steps {
        let k1 = a.mul_vec(&y);
        let k2 = a.mul_vec(&axpy(&y, &k1, 0.5 * h));
        let k3 = a.mul_vec(&axpy(&y, &k2, 0.5 * h));
        let k4 = a.mul_vec(&axpy(&y, &k3, h));
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

/// One term of an initial-data file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InitialTerm {
    /// Exponents `[a, b, c, d]` of `x₀^a x₁^b x₂^c x₃^d`.
    pub monomial: [u32; 4],
    /// Coframe axis, 1, 2 or 3.
    pub axis: usize,
    pub coefficient: f64,
}

/// Initial data `η₀ = Σ coefficient · x^monomial · η^axis`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InitialData {
    pub schema_version: u32,
    pub terms: Vec<InitialTerm>,
}

impl InitialData {
    pub const SCHEMA_VERSION: u32 = 1;

    pub fn to_field(&self) -> Result<CoframeField<f64>> {
        if self.schema_version != Self::SCHEMA_VERSION {
            return Err(Error::Invalid(format!(
                "initial data schema_version {} (expected {})",
                self.schema_version,
                Self::SCHEMA_VERSION
            )));
        }
        let mut field = CoframeField::zero();
        for t in &self.terms {
            if !(1..=3).contains(&t.axis) {
                return Err(Error::Invalid(format!("axis {} not in 1..=3", t.axis)));
            }
            let p = PolyScalar::monomial(Monomial(t.monomial), t.coefficient);
            field.alpha[t.axis - 1] = field.alpha[t.axis - 1].add(&p);
        }
        Ok(field)
    }
}

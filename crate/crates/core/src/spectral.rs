//! Spectrum of `*d` on divergence-free 1-forms of S³.
//!
//! The degree-`≤ D` coframe space is exactly invariant under `*d`, so the
//! truncated operator has integer eigenvalues. Positive eigenvalues
//! `λ = d + 2` come from coefficient degree `d` and negative ones `λ = −d`
//! from degree `d ≥ 2`; a truncation at `D` therefore holds every eigenspace
//! with `|λ| ≤ D` in full (and the positive ones up to `D + 2`).

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{generalized_symmetric_eigen, DenseMatrix, Nullspace};
use crate::poly::{operator_matrix, Basis, CoframeField, OperatorKind};
use crate::sampling::Sampler;
use crate::scalar::{Rational, Scalar};

pub const CLUSTER_TOLERANCE: f64 = 1e-8;

/// Smallest degree whose trusted window is non-empty.
pub const MIN_TRUSTED_DEGREE: u32 = 2;

/// Largest `|λ|` whose eigenspace is complete at truncation degree `D`.
///
/// `None` means the window holds no admissible eigenvalue.
pub fn trusted_window(degree: u32) -> Option<u32> {
    (degree >= MIN_TRUSTED_DEGREE).then_some(degree)
}

/// The kernel of `div` on the degree-`≤ D` coframe space with `*d`
/// restricted to it.
#[derive(Debug, Clone)]
pub struct DivergenceFreeSubspace {
    pub basis: Basis,
    pub kernel: Nullspace<Rational>,
    /// `*d` in kernel coordinates: `S·K = K·M`.
    pub star_d: DenseMatrix<Rational>,
    /// `Kᵀ G K` in units of π².
    pub gram: DMatrix<f64>,
    invariance: f64,
}

pub fn divergence_free_subspace(degree: u32) -> DivergenceFreeSubspace {
    let div = operator_matrix::<Rational>(OperatorKind::Div, degree);
    let star = operator_matrix::<Rational>(OperatorKind::StarD, degree);
    let kernel = div.matrix.nullspace();
    let k = &kernel.basis;
    let sk = star.matrix.mul(k);
    let mut m = DenseMatrix::zeros(kernel.dim(), kernel.dim());
    for (row, &free) in kernel.free_columns.iter().enumerate() {
        for c in 0..kernel.dim() {
            m.set(row, c, sk.get(free, c).clone());
        }
    }
    let defect = sk.to_f64_matrix() - k.mul(&m).to_f64_matrix();
    let invariance = defect.amax();
    let kf = k.to_f64_matrix();
    let g = star.gram.to_f64_matrix();
    let gram = kf.transpose() * g * &kf;
    DivergenceFreeSubspace {
        basis: div.basis,
        kernel,
        star_d: m,
        gram,
        invariance,
    }
}

impl DivergenceFreeSubspace {
    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn degree(&self) -> u32 {
        self.basis.degree()
    }

    pub fn fields(&self) -> Vec<CoframeField<Rational>> {
        (0..self.dim())
            .map(|c| CoframeField::from_vector(&self.basis, &self.kernel.basis.column(c)))
            .collect()
    }

    /// `‖(I − P)·*d·P‖_max`; zero when the subspace is `*d`-invariant.
    pub fn invariance_residual(&self) -> f64 {
        self.invariance
    }

    fn field_from_coords(&self, c: &DVector<f64>) -> CoframeField<f64> {
        let k = self.kernel.basis.to_f64_matrix();
        let v = k * c;
        CoframeField::from_vector(&self.basis, v.as_slice())
    }
}

trait ToF64Matrix {
    fn to_f64_matrix(&self) -> DMatrix<f64>;
}

impl<R: Scalar> ToF64Matrix for DenseMatrix<R> {
    fn to_f64_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows(), self.cols(), |r, c| self.get(r, c).to_f64())
    }
}

/// An L²-normalized eigenfield of `*d`.
#[derive(Debug, Clone)]
pub struct SpectralMode {
    pub lambda: f64,
    pub lambda_int: i64,
    pub field: CoframeField<f64>,
    pub norm: f64,
}

impl SpectralMode {
    /// L² norm of `div(field)`.
    pub fn div_residual(&self) -> f64 {
        let d = self.field.div();
        d.l2_pairing_pi2(&d).max(0.0).sqrt() * std::f64::consts::PI
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModeCount {
    pub lambda: i64,
    pub multiplicity: usize,
    pub in_window: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SpectrumResiduals {
    pub max_integer_deviation: f64,
    pub max_eigen_residual: f64,
    pub max_div_residual: f64,
    pub max_cross_gram: f64,
    pub gram_asymmetry: f64,
    pub invariance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    #[serde(rename = "D")]
    pub degree: u32,
    pub ring: &'static str,
    pub dimension: usize,
    pub trusted_window: Option<u32>,
    pub window_status: &'static str,
    pub min_abs_lambda: Option<i64>,
    pub modes: Vec<ModeCount>,
    pub residuals: SpectrumResiduals,
}

impl SpectrumReport {
    fn new(degree: u32, ring: &'static str, dimension: usize, counts: BTreeMap<i64, usize>) -> Self {
        let window = trusted_window(degree);
        let modes = counts
            .into_iter()
            .map(|(lambda, multiplicity)| ModeCount {
                lambda,
                multiplicity,
                in_window: window.is_some_and(|w| lambda.unsigned_abs() <= w as u64),
            })
            .collect::<Vec<_>>();
        Self {
            degree,
            ring,
            dimension,
            trusted_window: window,
            window_status: if window.is_some() { "ok" } else { "window empty" },
            min_abs_lambda: modes.iter().map(|m| m.lambda.abs()).min(),
            modes,
            residuals: SpectrumResiduals::default(),
        }
    }

    pub fn multiplicity(&self, lambda: i64) -> usize {
        self.modes
            .iter()
            .find(|m| m.lambda == lambda)
            .map_or(0, |m| m.multiplicity)
    }

    pub fn window_modes(&self) -> impl Iterator<Item = &ModeCount> {
        self.modes.iter().filter(|m| m.in_window)
    }

    /// Failures of the gap and of `mult(λ) = λ² − 1` inside the window.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for m in &self.modes {
            if m.lambda.abs() < 2 {
                out.push(format!("eigenvalue {} inside the gap", m.lambda));
            }
        }
        if let Some(w) = self.trusted_window {
            let w = w as i64;
            for lambda in (-w..=w).filter(|l| l.abs() >= 2) {
                let want = (lambda * lambda - 1) as usize;
                let got = self.multiplicity(lambda);
                if got != want {
                    out.push(format!("mult({lambda}) = {got}, expected {want}"));
                }
            }
        }
        if self.residuals.max_integer_deviation > CLUSTER_TOLERANCE {
            out.push(format!(
                "eigenvalue off an integer by {:e}",
                self.residuals.max_integer_deviation
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub modes: Vec<SpectralMode>,
    pub report: SpectrumReport,
}

impl Spectrum {
    pub fn modes_with(&self, lambda: i64) -> impl Iterator<Item = &SpectralMode> {
        self.modes.iter().filter(move |m| m.lambda_int == lambda)
    }

    pub fn first_mode(&self, lambda: i64) -> Option<&SpectralMode> {
        self.modes_with(lambda).next()
    }
}

/// Groups sorted values whose neighbours differ by at most `tol`.
pub fn cluster(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some((sum, n, last)) if (v - *last).abs() <= tol * last.abs().max(1.0) => {
                *sum += v;
                *n += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(s, n, _)| (s / n as f64, n)).collect()
}

/// Float eigen-decomposition with `G`-orthonormal eigenfields.
pub fn eigen_decompose(degree: u32) -> Result<Spectrum> {
    let sub = divergence_free_subspace(degree);
    decompose_subspace(&sub)
}

pub fn decompose_subspace(sub: &DivergenceFreeSubspace) -> Result<Spectrum> {
    let n = sub.dim();
    let m = sub.star_d.to_f64_matrix();
    let b = &sub.gram * &m;
    let eig = generalized_symmetric_eigen(&b, &sub.gram)?;
    let pi = std::f64::consts::PI;

    let mut residuals = SpectrumResiduals {
        gram_asymmetry: eig.asymmetry,
        invariance: sub.invariance_residual(),
        ..Default::default()
    };
    let mut modes = Vec::with_capacity(n);
    for (i, &lambda) in eig.values.iter().enumerate() {
        let c = eig.vectors.column(i).into_owned();
        let r = (&b * &c - &sub.gram * &c * lambda).amax();
        residuals.max_eigen_residual = residuals.max_eigen_residual.max(r);
        let rounded = lambda.round();
        residuals.max_integer_deviation = residuals.max_integer_deviation.max((lambda - rounded).abs());
        // Coordinates are orthonormal in units of π²; rescale to unit L² norm.
        let field = sub.field_from_coords(&(c / pi));
        let norm = field.l2_norm();
        let mode = SpectralMode {
            lambda,
            lambda_int: rounded as i64,
            field,
            norm,
        };
        residuals.max_div_residual = residuals.max_div_residual.max(mode.div_residual());
        modes.push(mode);
    }
    let cross = eig.vectors.transpose() * &sub.gram * &eig.vectors;
    for i in 0..n {
        for j in 0..n {
            if modes[i].lambda_int != modes[j].lambda_int {
                residuals.max_cross_gram = residuals.max_cross_gram.max(cross[(i, j)].abs());
            }
        }
    }
    let mut counts = BTreeMap::new();
    for (value, mult) in cluster(&eig.values, CLUSTER_TOLERANCE) {
        *counts.entry(value.round() as i64).or_insert(0) += mult;
    }
    let mut report = SpectrumReport::new(sub.degree(), "float", n, counts);
    report.residuals = residuals;
    Ok(Spectrum { modes, report })
}

/// Exact multiplicities from `nullity(M − λ)` at every candidate integer.
pub fn exact_spectrum(degree: u32) -> Result<SpectrumReport> {
    let sub = divergence_free_subspace(degree);
    let bound = degree as i64 + 2;
    let mut counts = BTreeMap::new();
    let mut total = 0;
    for lambda in -bound..=bound {
        let k = sub.star_d.shifted(&Rational::from_i64(lambda)).nullity();
        if k > 0 {
            counts.insert(lambda, k);
            total += k;
        }
    }
    if total != sub.dim() {
        return Err(Error::EigenSolver(format!(
            "{} of {} eigenvalues are not integers in [-{bound}, {bound}]",
            sub.dim() - total,
            sub.dim()
        )));
    }
    let mut report = SpectrumReport::new(degree, "exact", sub.dim(), counts);
    report.residuals.invariance = sub.invariance_residual();
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct NormSpread {
    pub lambda: i64,
    pub samples: usize,
    pub seed: u64,
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    /// `spread / mean(|η|²)`.
    pub relative_spread: f64,
}

/// Range of `|η|²` over seeded uniform samples of S³.
pub fn constant_norm_check(mode: &SpectralMode, samples: usize, seed: u64) -> NormSpread {
    let mut s = Sampler::new(seed);
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for _ in 0..samples {
        let v = mode.field.pointwise_norm_sq(&s.sphere_point().coords());
        lo = lo.min(v);
        hi = hi.max(v);
        sum += v;
    }
    let mean = sum / samples.max(1) as f64;
    NormSpread {
        lambda: mode.lambda_int,
        samples,
        seed,
        min: lo,
        max: hi,
        spread: hi - lo,
        relative_spread: (hi - lo) / mean,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HodgeLaplacianReport {
    pub degree: u32,
    pub trusted_window: Option<u32>,
    /// `(μ, multiplicity)` for every cluster of `(*d)²`.
    pub eigenvalues: Vec<(f64, usize)>,
    pub min_eigenvalue: f64,
    pub max_square_deviation: f64,
}

impl HodgeLaplacianReport {
    pub fn window_eigenvalues(&self) -> Vec<i64> {
        let w = self.trusted_window.map_or(0.0, |w| (w * w) as f64);
        self.eigenvalues
            .iter()
            .filter(|(mu, _)| *mu <= w + 0.5)
            .map(|(mu, _)| mu.round() as i64)
            .collect()
    }
}

/// Eigenvalues of `(*d)²` on the divergence-free subspace.
pub fn hodge_laplacian_check(degree: u32) -> Result<HodgeLaplacianReport> {
    let sub = divergence_free_subspace(degree);
    let m = sub.star_d.to_f64_matrix();
    let b = &sub.gram * &m * &m;
    let eig = generalized_symmetric_eigen(&b, &sub.gram)?;
    let clusters = cluster(&eig.values, CLUSTER_TOLERANCE);
    let max_square_deviation = clusters
        .iter()
        .map(|(mu, _)| (mu - mu.sqrt().round().powi(2)).abs())
        .fold(0.0, f64::max);
    Ok(HodgeLaplacianReport {
        degree,
        trusted_window: trusted_window(degree),
        min_eigenvalue: eig.values.first().copied().unwrap_or(f64::NAN),
        eigenvalues: clusters,
        max_square_deviation,
    })
}

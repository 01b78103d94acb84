//! Closed self-dual 2-forms on flat ℝ⁴ built from `*d` eigenfields on S³.
//!
//! Orientation is `dt∧η¹∧η²∧η³ = dx⁰∧dx¹∧dx²∧dx³`. Norms use
//! `|ω|² = Σ_{a<b} ω_ab²`, which equals `*(ω∧ω)` on self-dual forms, so
//! each Kähler form `ω^i` has unit norm.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::fd;
use crate::frame::{dot4, frame_vector, norm4, FrameKind};
use crate::maxwell::ModeExpansion;
use crate::poly::CoframeField;
use crate::quadrature::{gauss_legendre_on, SphereRule};
use crate::scalar::Rational;
use crate::spectral::SpectralMode;

/// Index pairs of the independent components, in storage order.
pub const PAIRS4: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// A 2-form at a point, as its antisymmetric Cartesian component matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoForm(pub [[f64; 4]; 4]);

impl TwoForm {
    pub fn zero() -> Self {
        TwoForm([[0.0; 4]; 4])
    }

    /// From `(ω01, ω02, ω03, ω12, ω13, ω23)`.
    pub fn from_upper(c: [f64; 6]) -> Self {
        let mut m = [[0.0; 4]; 4];
        for (k, &(a, b)) in PAIRS4.iter().enumerate() {
            m[a][b] = c[k];
            m[b][a] = -c[k];
        }
        TwoForm(m)
    }

    pub fn upper(&self) -> [f64; 6] {
        PAIRS4.map(|(a, b)| self.0[a][b])
    }

    /// `u∧v` for covectors given by their components.
    pub fn wedge(u: &[f64; 4], v: &[f64; 4]) -> Self {
        TwoForm(std::array::from_fn(|a| std::array::from_fn(|b| u[a] * v[b] - u[b] * v[a])))
    }

    pub fn add(&self, other: &Self) -> Self {
        TwoForm(std::array::from_fn(|a| std::array::from_fn(|b| self.0[a][b] + other.0[a][b])))
    }

    pub fn scale(&self, s: f64) -> Self {
        TwoForm(self.0.map(|row| row.map(|v| v * s)))
    }

    pub fn star(&self) -> Self {
        let [w01, w02, w03, w12, w13, w23] = self.upper();
        TwoForm::from_upper([w23, -w13, w12, w03, -w02, w01])
    }

    pub fn norm_sq(&self) -> f64 {
        self.upper().iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `*(ω∧σ)`.
    pub fn wedge_pairing(&self, other: &Self) -> f64 {
        let [a01, a02, a03, a12, a13, a23] = self.upper();
        let [b01, b02, b03, b12, b13, b23] = other.upper();
        a01 * b23 + a23 * b01 - a02 * b13 - a13 * b02 + a03 * b12 + a12 * b03
    }

    /// `max |ω − *ω|`.
    pub fn self_duality_residual(&self) -> f64 {
        let s = self.star();
        self.upper()
            .iter()
            .zip(s.upper())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

fn radial(x: &[f64; 4]) -> Result<(f64, [f64; 4])> {
    let t = norm4(x);
    if t == 0.0 || !t.is_finite() {
        return Err(Error::AtOrigin(*x));
    }
    Ok((t, x.map(|v| v / t)))
}

/// `ω^i = (1/√2)(t dt∧η^i + ½t²ε^i_{jk}η^j∧η^k)` at `x`, with
/// `η^i|_x(v) = ⟨X_i(x/|x|), v⟩/|x|`.
pub fn eval_kahler_basis(axis: usize, x: &[f64; 4]) -> Result<TwoForm> {
    let (t, xh) = radial(x)?;
    let eta = |i: usize| frame_vector(FrameKind::Left, i, xh).map(|v| v / t);
    let (j, k) = ((axis + 1) % 3, (axis + 2) % 3);
    let first = TwoForm::wedge(&xh, &eta(axis)).scale(t);
    let second = TwoForm::wedge(&eta(j), &eta(k)).scale(t * t);
    Ok(first.add(&second).scale(1.0 / SQRT_2))
}

/// `F_t(ω) = i_{√2 dt} ω`, as coefficients `c_i` of `c_i η^i`.
pub fn f_t_map(omega: &TwoForm, x: &[f64; 4]) -> Result<[f64; 3]> {
    let (t, xh) = radial(x)?;
    Ok([0, 1, 2].map(|i| {
        let e = frame_vector(FrameKind::Left, i, xh);
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                s += xh[a] * omega.0[a][b] * e[b];
            }
        }
        SQRT_2 * t * s
    }))
}

/// Inverse of [`f_t_map`] onto self-dual forms: `Σ (c_i/t) ω^i`.
pub fn f_t_inverse(c: &[f64; 3], x: &[f64; 4]) -> Result<TwoForm> {
    let t = norm4(x);
    let mut out = TwoForm::zero();
    for (i, ci) in c.iter().enumerate() {
        out = out.add(&eval_kahler_basis(i, x)?.scale(ci / t));
    }
    Ok(out)
}

/// `g`-norm of the 1-form `c_i η^i` at radius `t`.
pub fn coframe_norm(c: &[f64; 3], t: f64) -> f64 {
    c.iter().map(|v| v * v).sum::<f64>().sqrt() / t
}

/// One term `C t^p ω_λ` with `ω_λ = F_t⁻¹(t η_λ)`.
#[derive(Debug, Clone)]
pub struct SeriesTerm {
    pub lambda: i64,
    pub power: f64,
    pub coefficient: f64,
    pub field: CoframeField<f64>,
}

impl SeriesTerm {
    /// The closed term with the natural power `λ − 2`.
    pub fn new(field: CoframeField<f64>, lambda: i64, coefficient: f64) -> Self {
        Self {
            lambda,
            power: (lambda - 2) as f64,
            coefficient,
            field,
        }
    }
}

/// A finite series `Σ C_λ t^{λ−2} ω_λ` evaluated on an annulus.
#[derive(Debug, Clone)]
pub struct SelfDualForm {
    pub terms: Vec<SeriesTerm>,
    /// Open radial interval on which evaluation is allowed.
    pub annulus: (f64, f64),
}

impl SelfDualForm {
    pub fn new(terms: Vec<SeriesTerm>) -> Self {
        Self {
            terms,
            annulus: (0.0, f64::INFINITY),
        }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new())
    }

    pub fn from_modes(modes: &[(SpectralMode, f64)]) -> Self {
        Self::new(
            modes
                .iter()
                .map(|(m, c)| SeriesTerm::new(m.field.clone(), m.lambda_int, *c))
                .collect(),
        )
    }

    pub fn from_mode(mode: &SpectralMode) -> Self {
        Self::from_modes(&[(mode.clone(), 1.0)])
    }

    /// `Σ C_λ (t/t₀)^{λ−2} ω_λ`.
    pub fn from_expansion(exp: &ModeExpansion) -> Self {
        Self::new(
            exp.terms
                .iter()
                .map(|(m, c)| {
                    let scale = exp.t0.powf(2.0 - m.lambda_int as f64);
                    SeriesTerm::new(m.field.clone(), m.lambda_int, c * scale)
                })
                .collect(),
        )
    }

    /// The Kähler form `ω^axis`, from the left-invariant `η^axis`.
    pub fn kahler(axis: usize) -> Self {
        Self::new(vec![SeriesTerm::new(CoframeField::left_invariant(axis), 2, 1.0)])
    }

    /// `t⁻⁴ ω₋₂` from the right-invariant unit form along `axis`.
    pub fn anti_kahler(axis: usize) -> Self {
        let f = CoframeField::<Rational>::right_invariant(axis).to_f64();
        Self::new(vec![SeriesTerm::new(f, -2, 1.0)])
    }

    pub fn plus(mut self, other: Self) -> Self {
        self.terms.extend(other.terms);
        self.annulus = (self.annulus.0.max(other.annulus.0), self.annulus.1.min(other.annulus.1));
        self
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for t in &mut self.terms {
            t.coefficient *= s;
        }
        self
    }

    pub fn with_annulus(mut self, inner: f64, outer: f64) -> Self {
        self.annulus = (inner, outer);
        self
    }

    /// Shifts every radial power by `delta`; used for negative controls.
    pub fn with_power_shift(mut self, delta: f64) -> Self {
        for t in &mut self.terms {
            t.power += delta;
        }
        self
    }

    pub(crate) fn check_radius(&self, t: f64, reach: f64) -> Result<()> {
        let (inner, outer) = self.annulus;
        if t - reach <= inner || t + reach >= outer || t - reach <= 0.0 {
            return Err(Error::OutsideAnnulus {
                radius: t,
                inner,
                outer,
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64; 4]) -> Result<TwoForm> {
        let (t, _) = radial(x)?;
        self.check_radius(t, 0.0)?;
        self.eval_unchecked(x)
    }

    fn eval_unchecked(&self, x: &[f64; 4]) -> Result<TwoForm> {
        let (t, xh) = radial(x)?;
        let mut out = TwoForm::zero();
        for term in &self.terms {
            let alpha = term.field.eval(&xh);
            // F_t⁻¹(t η_λ) = Σ α_i ω^i.
            let omega = f_t_inverse(&alpha.map(|a| a * t), x)?;
            out = out.add(&omega.scale(term.coefficient * t.powf(term.power)));
        }
        Ok(out)
    }

    pub(crate) fn upper_at(&self) -> impl Fn(&[f64; 4]) -> [f64; 6] + '_ {
        move |y| self.eval_unchecked(y).map(|w| w.upper()).unwrap_or([f64::NAN; 6])
    }

    /// Whether every term is a constant-coefficient λ = 2 term.
    pub fn is_covariant_constant(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.power == 0.0 && t.field.degree() == 0)
    }
}

/// `max |(dω)_{abc}|` by second-order central differences.
pub fn d_residual(sdf: &SelfDualForm, x: &[f64; 4], h: f64) -> Result<f64> {
    let (t, _) = radial(x)?;
    sdf.check_radius(t, 2.0 * h)?;
    let f = sdf.upper_at();
    let j = fd::jacobian(&f, x, h, false);
    let comp = |a: usize, b: usize| -> usize { PAIRS4.iter().position(|&p| p == (a, b)).expect("a < b") };
    let mut worst: f64 = 0.0;
    for (a, b, c) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
        let v = j[a][comp(b, c)] - j[b][comp(a, c)] + j[c][comp(a, b)];
        worst = worst.max(v.abs());
    }
    Ok(worst)
}

/// Step-halving behaviour of [`d_residual`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct ClosednessReport {
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `r(h)/r(h/2)` for consecutive steps.
    pub ratios: Vec<f64>,
    /// Residuals at rounding level: the stencil is exact for this form.
    pub exact: bool,
}

/// Residual level below which a stencil counts as exact.
pub const EXACT_RESIDUAL: f64 = 1e-10;

impl ClosednessReport {
    pub fn second_order(&self) -> bool {
        self.exact || self.ratios.iter().all(|r| (3.5..=4.5).contains(r))
    }
}

pub fn closedness_convergence(sdf: &SelfDualForm, x: &[f64; 4], steps: &[f64]) -> Result<ClosednessReport> {
    let scale = sdf.eval(x)?.norm().max(1.0);
    let residuals = steps
        .iter()
        .map(|&h| d_residual(sdf, x, h))
        .collect::<Result<Vec<_>>>()?;
    let exact = residuals.iter().all(|r| *r <= EXACT_RESIDUAL * scale);
    let ratios = residuals.windows(2).map(|w| w[0] / w[1]).collect();
    Ok(ClosednessReport {
        steps: steps.to_vec(),
        residuals,
        ratios,
        exact,
    })
}

/// Kato ratio `|∇|ω||² / |∇ω|²` with fourth-order differences.
pub fn kato_ratio(sdf: &SelfDualForm, x: &[f64; 4], h: f64) -> Result<f64> {
    let (t, _) = radial(x)?;
    sdf.check_radius(t, 2.0 * h)?;
    let f = sdf.upper_at();
    let w = f(x);
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= 1e-8 {
        return Err(Error::NearZero(norm));
    }
    let j = fd::jacobian(&f, x, h, true);
    let grad_sq: f64 = j.iter().flatten().map(|v| v * v).sum();
    if grad_sq.sqrt() <= 1e-10 * norm.max(1.0) {
        return Err(Error::ConstantForm);
    }
    let grad_norm_sq: f64 = j
        .iter()
        .map(|row| {
            let d: f64 = row.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / norm;
            d * d
        })
        .sum();
    Ok(grad_norm_sq / grad_sq)
}

/// Improved Kato constant for closed self-dual 2-forms.
pub const KATO_BOUND: f64 = 2.0 / 3.0;

/// `max_{ab} |Δω_ab|` with the flat 9-point stencil.
pub fn harmonic_residual(sdf: &SelfDualForm, x: &[f64; 4], h: f64) -> Result<f64> {
    let (t, _) = radial(x)?;
    sdf.check_radius(t, 2.0 * h)?;
    let lap = fd::laplacian(&sdf.upper_at(), x, h);
    Ok(lap.iter().fold(0.0, |m, v| m.max(v.abs())))
}

/// `∫_{|x|=t} i_{dt}(ω_{λ₁}∧ω_{λ₂}) = t³ ⟨η_{λ₁}, η_{λ₂}⟩_{L²(S³)}`.
pub fn l2_shell_orthogonality(m1: &SpectralMode, m2: &SpectralMode, t: f64) -> f64 {
    t.powi(3) * m1.field.inner(&m2.field)
}

/// The same shell integral by quadrature of the pointwise wedge.
pub fn shell_pairing_quadrature(m1: &SpectralMode, m2: &SpectralMode, t: f64) -> Result<f64> {
    let a = SelfDualForm::from_mode(m1).with_power_shift(-(m1.lambda_int - 2) as f64);
    let b = SelfDualForm::from_mode(m2).with_power_shift(-(m2.lambda_int - 2) as f64);
    let rule = SphereRule::exact_for((m1.field.degree() + m2.field.degree()) as usize);
    let mut sum = 0.0;
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let x = p.map(|v| v * t);
        sum += w * a.eval(&x)?.wedge_pairing(&b.eval(&x)?);
    }
    Ok(t.powi(3) * sum)
}

/// `∫_{t≤T} ω_{λ₁}∧ω_{λ₂}` by radial Gauss–Legendre over shell quadratures.
pub fn ball_orthogonality(m1: &SpectralMode, m2: &SpectralMode, radius: f64) -> Result<f64> {
    let mut sum = 0.0;
    for (t, w) in gauss_legendre_on(4, 0.0, radius) {
        sum += w * shell_pairing_quadrature(m1, m2, t)?;
    }
    Ok(sum)
}

pub const SAMPLE_CSV_HEADER: &str =
    "x0,x1,x2,x3,omega_01,omega_02,omega_03,omega_12,omega_13,omega_23,norm";

/// Point samples of `ω` as CSV rows.
pub fn sample_csv(sdf: &SelfDualForm, points: &[[f64; 4]]) -> Result<String> {
    let mut s = String::from(SAMPLE_CSV_HEADER);
    s.push('\n');
    for p in points {
        let w = sdf.eval(p)?;
        let cells: Vec<String> = p
            .iter()
            .chain(w.upper().iter())
            .chain(std::iter::once(&w.norm()))
            .map(|v| format!("{v:.12e}"))
            .collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    Ok(s)
}

/// Pointwise inner product `⟨ω, σ⟩` of two forms.
pub fn pointwise_inner(a: &TwoForm, b: &TwoForm) -> f64 {
    let (ua, ub) = (a.upper(), b.upper());
    ua.iter().zip(&ub).map(|(x, y)| x * y).sum()
}

/// Orthonormality defect of the coframe `{dt, tη¹, tη², tη³}` at `x`.
pub fn coframe_residual(x: &[f64; 4]) -> Result<f64> {
    let (_, xh) = radial(x)?;
    let mut vs = vec![xh];
    for i in 0..3 {
        vs.push(frame_vector(FrameKind::Left, i, xh));
    }
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot4(&vs[a], &vs[b]) - want).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;
    use crate::spectral::eigen_decompose;

    fn random_points(n: usize, seed: u64, r: (f64, f64)) -> Vec<[f64; 4]> {
        let mut s = Sampler::new(seed);
        (0..n).map(|_| s.shell_point(r.0, r.1)).collect()
    }

    #[test]
    fn kahler_forms_are_unit_self_dual_and_constant() {
        let reference: Vec<TwoForm> = (0..3).map(|i| eval_kahler_basis(i, &[1.0, 0.0, 0.0, 0.0]).unwrap()).collect();
        for x in random_points(100, 5, (0.1, 10.0)) {
            for i in 0..3 {
                let w = eval_kahler_basis(i, &x).unwrap();
                assert!((w.norm_sq() - 1.0).abs() < 1e-12);
                assert!((w.wedge_pairing(&w) - 1.0).abs() < 1e-12);
                assert!(w.self_duality_residual() < 1e-12);
                let diff = w.add(&reference[i].scale(-1.0)).norm();
                assert!(diff < 1e-12);
            }
        }
        let w1 = reference[0].upper();
        let r = 1.0 / SQRT_2;
        assert!((w1[0] - r).abs() < 1e-15 && (w1[5] - r).abs() < 1e-15);
        assert!(eval_kahler_basis(0, &[0.0; 4]).is_err());
    }

    #[test]
    fn kahler_triple_is_orthonormal_under_wedge() {
        let x = [0.3, -1.2, 0.4, 0.9];
        for i in 0..3 {
            for j in 0..3 {
                let p = eval_kahler_basis(i, &x).unwrap().wedge_pairing(&eval_kahler_basis(j, &x).unwrap());
                assert!((p - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn f_t_round_trip_and_isometry() {
        let mut s = Sampler::new(11);
        for _ in 0..100 {
            let x = s.shell_point(0.2, 5.0);
            let t = norm4(&x);
            for i in 0..3 {
                let c = f_t_map(&eval_kahler_basis(i, &x).unwrap(), &x).unwrap();
                let mut want = [0.0; 3];
                want[i] = t;
                assert!((0..3).all(|k| (c[k] - want[k]).abs() < 1e-12));
            }
            let c = [s.uniform(-1.0, 1.0), s.uniform(-1.0, 1.0), s.uniform(-1.0, 1.0)];
            let w = f_t_inverse(&c, &x).unwrap();
            let back = f_t_map(&w, &x).unwrap();
            assert!((0..3).all(|k| (back[k] - c[k]).abs() < 1e-12));
            assert!((w.norm() - coframe_norm(&c, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn series_norms() {
        let k = SelfDualForm::kahler(0);
        let ak = SelfDualForm::anti_kahler(0);
        for x in random_points(50, 2, (0.3, 3.0)) {
            let t = norm4(&x);
            assert!((k.eval(&x).unwrap().norm() - 1.0).abs() < 1e-12);
            let w = ak.eval(&x).unwrap();
            assert!((w.norm() - t.powi(-4)).abs() < 1e-12 * t.powi(-4));
            assert!(w.self_duality_residual() < 1e-10 * w.norm());
        }
        assert_eq!(SelfDualForm::empty().eval(&[1.0, 2.0, 0.0, 0.0]).unwrap(), TwoForm::zero());
        let bounded = SelfDualForm::anti_kahler(0).with_annulus(0.5, 2.0);
        assert!(matches!(bounded.eval(&[0.1, 0.0, 0.0, 0.0]), Err(Error::OutsideAnnulus { .. })));
    }

    #[test]
    fn closedness_of_basic_forms() {
        let x = [0.6, -0.3, 0.5, 0.54];
        assert!(d_residual(&SelfDualForm::kahler(1), &x, 1e-3).unwrap() < 1e-12);
        let ak = SelfDualForm::anti_kahler(0);
        let at_unit = x.map(|v| v / norm4(&x));
        assert!(d_residual(&ak, &at_unit, 1e-3).unwrap() < 1e-5);
        let report = closedness_convergence(&ak, &at_unit, &[1e-2, 5e-3, 2.5e-3]).unwrap();
        assert!(!report.exact && report.second_order(), "{report:?}");
        let wrong = SelfDualForm::anti_kahler(0).with_power_shift(1.0);
        assert!(d_residual(&wrong, &at_unit, 1e-3).unwrap() > 0.1);
        assert!(!closedness_convergence(&wrong, &at_unit, &[1e-2, 5e-3]).unwrap().second_order());
    }

    #[test]
    fn all_modes_give_closed_forms() {
        let s = eigen_decompose(3).unwrap();
        let x = [0.2, 0.7, -0.4, 0.5];
        for m in &s.modes {
            let f = SelfDualForm::from_mode(m);
            let r = closedness_convergence(&f, &x, &[1e-2, 5e-3, 2.5e-3]).unwrap();
            assert!(r.second_order(), "λ = {}: {r:?}", m.lambda);
            assert!(f.eval(&x).unwrap().self_duality_residual() < 1e-10);
        }
    }

    #[test]
    fn kato_inequality() {
        let x = [0.7, 0.1, -0.5, 0.3];
        assert_eq!(kato_ratio(&SelfDualForm::kahler(0), &x, 1e-3), Err(Error::ConstantForm));
        let mixed = SelfDualForm::kahler(1).plus(SelfDualForm::anti_kahler(0));
        let pure = SelfDualForm::anti_kahler(2);
        let mut checked = 0;
        for p in random_points(300, 8, (0.5, 2.0)) {
            for form in [&mixed, &pure] {
                match kato_ratio(form, &p, 1e-3) {
                    Ok(r) => {
                        assert!(r <= KATO_BOUND + 1e-6, "{r}");
                        checked += 1;
                    }
                    Err(Error::NearZero(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert!(checked > 590);
    }

    #[test]
    fn harmonic_components() {
        let x = [1.0, 0.0, 0.0, 0.0];
        // A coarse step keeps rounding (ε/h²) below the tolerance for a constant form.
        assert!(harmonic_residual(&SelfDualForm::kahler(2), &[0.3, 0.3, 0.3, 0.3], 5e-2).unwrap() < 1e-12);
        assert!(harmonic_residual(&SelfDualForm::anti_kahler(1), &x, 1e-3).unwrap() < 1e-4);
        let wrong = SelfDualForm::anti_kahler(1).with_power_shift(1.0);
        assert!(harmonic_residual(&wrong, &x, 1e-3).unwrap() > 0.1);
    }

    #[test]
    fn shell_and_ball_orthogonality() {
        let s = eigen_decompose(2).unwrap();
        let m2 = s.first_mode(2).unwrap();
        let mm2 = s.first_mode(-2).unwrap();
        let m3 = s.first_mode(3).unwrap();
        for t in [0.5, 1.0, 2.0] {
            assert!(l2_shell_orthogonality(m2, mm2, t).abs() < 1e-10);
            assert!(l2_shell_orthogonality(m2, m3, t).abs() < 1e-10);
            assert!(shell_pairing_quadrature(m2, m3, t).unwrap().abs() < 1e-10);
        }
        let own = l2_shell_orthogonality(m3, m3, 1.0);
        assert!((own - 1.0).abs() < 1e-10);
        assert!((shell_pairing_quadrature(m3, m3, 1.0).unwrap() - own).abs() < 1e-10);
        assert!(ball_orthogonality(mm2, m3, 1.5).unwrap().abs() < 1e-10);
        assert!((ball_orthogonality(m3, m3, 1.0).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn from_expansion_respects_reference_time() {
        let s = eigen_decompose(2).unwrap();
        let f = CoframeField::<Rational>::right_invariant(0).to_f64();
        let exp = crate::maxwell::decompose_initial(&f, &s.modes).unwrap().with_reference_time(2.0).unwrap();
        let sdf = SelfDualForm::from_expansion(&exp);
        let at_t0 = sdf.eval(&[2.0, 0.0, 0.0, 0.0]).unwrap();
        let unit = SelfDualForm::anti_kahler(0).eval(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(at_t0.add(&unit.scale(-1.0)).norm() < 1e-10);
    }

    #[test]
    fn csv_layout() {
        let csv = sample_csv(&SelfDualForm::kahler(0), &[[1.0, 0.0, 0.0, 0.0]]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SAMPLE_CSV_HEADER);
        assert_eq!(lines[1].split(',').count(), 11);
    }

    #[test]
    fn radial_coframe_is_orthonormal() {
        for x in random_points(20, 4, (0.5, 3.0)) {
            assert!(coframe_residual(&x).unwrap() < 1e-12);
        }
    }
}

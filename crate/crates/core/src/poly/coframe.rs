use std::f64::consts::PI;

use crate::frame::{field_matrix_int, levi_civita, FrameKind, PAIRS3};
use crate::scalar::Scalar;

use super::{Basis, Monomial, PolyScalar};

/// A 1-form `η = α_i η^i` on S³ with polynomial coefficients in the
/// left-invariant coframe.
#[derive(Clone, PartialEq)]
pub struct CoframeField<R> {
    pub alpha: [PolyScalar<R>; 3],
}

impl<R: Scalar> std::fmt::Debug for CoframeField<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.alpha.iter()).finish()
    }
}

impl<R: Scalar> CoframeField<R> {
    pub fn new(alpha: [PolyScalar<R>; 3]) -> Self {
        Self { alpha }
    }

    pub fn zero() -> Self {
        Self::new([PolyScalar::zero(), PolyScalar::zero(), PolyScalar::zero()])
    }

    /// The left-invariant coframe element `η^axis`.
    pub fn left_invariant(axis: usize) -> Self {
        let mut f = Self::zero();
        f.alpha[axis] = PolyScalar::constant(R::one());
        f
    }

    /// The right-invariant unit 1-form dual to `Y_axis(x) = q_axis·x`,
    /// written in the left coframe: `α_i(x) = ⟨Y_axis(x), X_i(x)⟩`.
    pub fn right_invariant(axis: usize) -> Self {
        let y = field_matrix_int(FrameKind::Right, axis);
        let alpha = [0, 1, 2].map(|i| {
            let x = field_matrix_int(FrameKind::Left, i);
            let mut terms = Vec::new();
            // ⟨Y x, X x⟩ = Σ_a Σ_{b,c} Y_ab X_ac x_b x_c
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        let k = y[a][b] * x[a][c];
                        if k != 0 {
                            let mut e = [0u32; 4];
                            e[b] += 1;
                            e[c] += 1;
                            terms.push((Monomial(e), R::from_i64(k)));
                        }
                    }
                }
            }
            PolyScalar::from_terms(terms)
        });
        Self::new(alpha)
    }

    /// `df` in frame components, `α_i = e_i(f)`.
    pub fn gradient(f: &PolyScalar<R>) -> Self {
        Self::new([0, 1, 2].map(|i| f.frame_derivative(i)))
    }

    pub fn degree(&self) -> u32 {
        self.alpha.iter().map(PolyScalar::degree).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.iter().all(PolyScalar::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new([0, 1, 2].map(|i| self.alpha[i].add(&other.alpha[i])))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new([0, 1, 2].map(|i| self.alpha[i].sub(&other.alpha[i])))
    }

    pub fn scale(&self, s: &R) -> Self {
        Self::new([0, 1, 2].map(|i| self.alpha[i].scale(s)))
    }

    /// `div η = Σ_i e_i(α_i)`.
    pub fn div(&self) -> PolyScalar<R> {
        (0..3).fold(PolyScalar::zero(), |acc, i| {
            acc.add(&self.alpha[i].frame_derivative(i))
        })
    }

    /// `(curl η)^k = ε^k_{ij} e_i(α_j)`.
    pub fn curl(&self) -> Self {
        let mut out = [PolyScalar::zero(), PolyScalar::zero(), PolyScalar::zero()];
        for (k, slot) in out.iter_mut().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    let e = levi_civita(k, i, j);
                    if e != 0 {
                        let term = self.alpha[j].frame_derivative(i).scale(&R::from_i64(e));
                        *slot = slot.add(&term);
                    }
                }
            }
        }
        Self::new(out)
    }

    /// Components of `dη` in the `(η¹∧η², η¹∧η³, η²∧η³)` basis:
    /// `(dη)_{jk} = e_j(α_k) − e_k(α_j) + Σ_i α_i · 2ε^i_{jk}`.
    pub fn exterior_derivative(&self) -> [PolyScalar<R>; 3] {
        PAIRS3.map(|(j, k)| {
            let mut c = self.alpha[k]
                .frame_derivative(j)
                .sub(&self.alpha[j].frame_derivative(k));
            for i in 0..3 {
                let s = 2 * levi_civita(i, j, k);
                if s != 0 {
                    c = c.add(&self.alpha[i].scale(&R::from_i64(s)));
                }
            }
            c
        })
    }

    /// `*dη`, using the S³ star `*(η^j∧η^k) = ε_i^{jk} η^i`.
    pub fn star_d(&self) -> Self {
        let d = self.exterior_derivative();
        Self::new([0, 1, 2].map(|i| {
            PAIRS3
                .iter()
                .enumerate()
                .fold(PolyScalar::zero(), |acc, (slot, &(j, k))| {
                    match levi_civita(i, j, k) {
                        0 => acc,
                        e => acc.add(&d[slot].scale(&R::from_i64(e))),
                    }
                })
        }))
    }

    pub fn eval(&self, x: &[f64; 4]) -> [f64; 3] {
        [0, 1, 2].map(|i| self.alpha[i].eval(x))
    }

    pub fn pointwise_norm_sq(&self, x: &[f64; 4]) -> f64 {
        self.eval(x).iter().map(|a| a * a).sum()
    }

    /// `⟨η, ζ⟩_{L²} / π²`.
    pub fn inner_pi2(&self, other: &Self) -> R {
        (0..3).fold(R::zero(), |acc, i| {
            acc + self.alpha[i].l2_pairing_pi2(&other.alpha[i])
        })
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.inner_pi2(other).to_f64() * PI * PI
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    /// Stacked coordinates `[α₁; α₂; α₃]` in `basis`.
    pub fn to_vector(&self, basis: &Basis) -> Vec<R> {
        self.alpha
            .iter()
            .flat_map(|a| basis.coordinates(a))
            .collect()
    }

    pub fn from_vector(basis: &Basis, v: &[R]) -> Self {
        let n = basis.len();
        assert_eq!(v.len(), 3 * n, "coframe vector length");
        Self::new([0, 1, 2].map(|i| basis.polynomial(&v[i * n..(i + 1) * n])))
    }

    pub fn to_f64(&self) -> CoframeField<f64> {
        CoframeField::new([0, 1, 2].map(|i| self.alpha[i].to_f64()))
    }
}

//! Exact calculus of polynomial scalars restricted to S³.
//!
//! A [`PolyScalar`] is a polynomial on ℝ⁴ kept in normal form modulo
//! `x₀² + x₁² + x₂² + x₃² − 1`: every `x₃²` is rewritten as
//! `1 − x₀² − x₁² − x₂²` until no monomial has an `x₃` exponent above one.
//! The reduced monomials of degree `≤ D` form a basis of the restrictions
//! of degree-`≤ D` polynomials to S³.

mod coframe;
mod operator;

pub use coframe::CoframeField;
pub use operator::{operator_matrix, OperatorKind, OperatorMatrix};

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;

use crate::frame::{field_matrix_int, FrameKind};
use crate::scalar::Scalar;

/// Exponent vector of `x₀^a x₁^b x₂^c x₃^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub [u32; 4]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; 4]);

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_reduced(&self) -> bool {
        self.0[3] <= 1
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        Monomial([0, 1, 2, 3].map(|i| self.0[i] + other.0[i]))
    }

    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&e, &v)| v.powi(e as i32))
            .product()
    }

    /// `∫_{S³} x^m dσ / π²`, as an exact ratio of integers.
    ///
    /// Zero if any exponent is odd, otherwise
    /// `2 ∏(2kᵢ−1)!! / (2^K (K+1)!)` with `mᵢ = 2kᵢ`, `K = Σkᵢ`.
    pub fn sphere_moment_ratio(&self) -> (i128, i128) {
        if self.0.iter().any(|e| e % 2 == 1) {
            return (0, 1);
        }
        let k: Vec<i128> = self.0.iter().map(|&e| (e / 2) as i128).collect();
        let total: i128 = k.iter().sum();
        let mut num: i128 = 2;
        for &ki in &k {
            num *= double_factorial(2 * ki - 1);
        }
        let mut den: i128 = 1 << total;
        den *= factorial(total + 1);
        let g = gcd(num, den);
        (num / g, den / g)
    }

    pub fn sphere_moment<R: Scalar>(&self) -> R {
        let (n, d) = self.sphere_moment_ratio();
        R::from_ratio(n, d)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{e}")?;
            }
        }
        Ok(())
    }
}

fn double_factorial(n: i128) -> i128 {
    let mut acc = 1;
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

fn factorial(n: i128) -> i128 {
    (1..=n).product::<i128>().max(1)
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs().max(1)
}

/// A polynomial scalar on S³ in reduced normal form.
#[derive(Clone, PartialEq)]
pub struct PolyScalar<R> {
    terms: BTreeMap<Monomial, R>,
}

impl<R: Scalar> fmt::Debug for PolyScalar<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("{c:?}*{m}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<R: Scalar> Default for PolyScalar<R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<R: Scalar> PolyScalar<R> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: R) -> Self {
        Self::monomial(Monomial::ONE, c)
    }

    /// The coordinate function `x_i`.
    pub fn variable(i: usize) -> Self {
        let mut e = [0; 4];
        e[i] = 1;
        Self::monomial(Monomial(e), R::one())
    }

    pub fn monomial(m: Monomial, c: R) -> Self {
        Self::from_terms([(m, c)])
    }

    /// Builds and reduces a polynomial from arbitrary (possibly unreduced)
    /// terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, R)>) -> Self {
        let mut raw = BTreeMap::new();
        for (m, c) in terms {
            accumulate(&mut raw, m, c);
        }
        Self { terms: reduce(raw) }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &R)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> R {
        self.terms.get(m).cloned().unwrap_or_else(R::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_reduced(&self) -> bool {
        self.terms.keys().all(Monomial::is_reduced)
    }

    /// Re-applies the normal form; a no-op on reduced input.
    pub fn reduced(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.clone())))
    }

    pub fn scale(&self, s: &R) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.clone() * s.clone())))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut out, *m, c.clone());
        }
        Self { terms: out }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-R::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut raw = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                accumulate(&mut raw, a.times(b), ca.clone() * cb.clone());
            }
        }
        Self { terms: reduce(raw) }
    }

    /// Exact derivative along the left-invariant field `X_axis(x) = x·q_axis`.
    pub fn frame_derivative(&self, axis: usize) -> Self {
        self.derivative_along(FrameKind::Left, axis)
    }

    /// Exact derivative along a linear frame field of either kind.
    pub fn derivative_along(&self, kind: FrameKind, axis: usize) -> Self {
        let m = field_matrix_int(kind, axis);
        let mut raw = BTreeMap::new();
        for (mono, c) in &self.terms {
            for (a, row) in m.iter().enumerate() {
                let ea = mono.0[a];
                if ea == 0 {
                    continue;
                }
                for (b, &mab) in row.iter().enumerate() {
                    if mab == 0 {
                        continue;
                    }
                    let mut e = mono.0;
                    e[a] -= 1;
                    e[b] += 1;
                    accumulate(&mut raw, Monomial(e), c.clone() * R::from_i64(ea as i64 * mab));
                }
            }
        }
        Self { terms: reduce(raw) }
    }

    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        self.terms.iter().map(|(m, c)| c.to_f64() * m.eval(x)).sum()
    }

    /// `∫_{S³} f dσ` in units of π² (exact for exact rings).
    pub fn sphere_integral_pi2(&self) -> R {
        self.terms
            .iter()
            .fold(R::zero(), |acc, (m, c)| acc + c.clone() * m.sphere_moment::<R>())
    }

    /// `∫_{S³} f dσ`.
    pub fn sphere_integral(&self) -> f64 {
        self.sphere_integral_pi2().to_f64() * PI * PI
    }

    /// `∫_{S³} f g dσ / π²` without forming the reduced product.
    pub fn l2_pairing_pi2(&self, other: &Self) -> R {
        let mut acc = R::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mom = a.times(b).sphere_moment::<R>();
                if !mom.is_zero() {
                    acc = acc + ca.clone() * cb.clone() * mom;
                }
            }
        }
        acc
    }

    pub fn map_scalar<S: Scalar>(&self, f: impl Fn(&R) -> S) -> PolyScalar<S> {
        PolyScalar::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    pub fn to_f64(&self) -> PolyScalar<f64> {
        self.map_scalar(|c| c.to_f64())
    }
}

fn accumulate<R: Scalar>(map: &mut BTreeMap<Monomial, R>, m: Monomial, c: R) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&m) {
        Some(v) => {
            let s = v.clone() + c;
            if s.is_zero() {
                map.remove(&m);
            } else {
                *v = s;
            }
        }
        None => {
            map.insert(m, c);
        }
    }
}

/// Rewrites `x₃^e`, `e ≥ 2`, via `x₃² = 1 − x₀² − x₁² − x₂²`.
fn reduce<R: Scalar>(mut map: BTreeMap<Monomial, R>) -> BTreeMap<Monomial, R> {
    loop {
        let Some(m) = map.keys().find(|m| !m.is_reduced()).copied() else {
            return map;
        };
        let c = map.remove(&m).expect("key present");
        let mut base = m.0;
        base[3] -= 2;
        accumulate(&mut map, Monomial(base), c.clone());
        for i in 0..3 {
            let mut e = base;
            e[i] += 2;
            accumulate(&mut map, Monomial(e), -c.clone());
        }
    }
}

/// The reduced monomials of degree `≤ D`, graded then lexicographic.
#[derive(Debug, Clone)]
pub struct Basis {
    degree: u32,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl Basis {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Coefficient vector of a reduced polynomial of degree `≤ D`.
    ///
    /// Panics if `f` has a term outside the basis.
    pub fn coordinates<R: Scalar>(&self, f: &PolyScalar<R>) -> Vec<R> {
        let mut v = vec![R::zero(); self.len()];
        for (m, c) in f.terms() {
            let i = self
                .index_of(m)
                .unwrap_or_else(|| panic!("monomial {m} outside degree-{} basis", self.degree));
            v[i] = c.clone();
        }
        v
    }

    pub fn polynomial<R: Scalar>(&self, coords: &[R]) -> PolyScalar<R> {
        assert_eq!(coords.len(), self.len());
        PolyScalar {
            terms: self
                .monomials
                .iter()
                .zip(coords)
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Gram matrix `∫ x^m x^n dσ / π²`.
    pub fn gram_pi2<R: Scalar>(&self) -> crate::linalg::DenseMatrix<R> {
        let n = self.len();
        let mut g = crate::linalg::DenseMatrix::zeros(n, n);
        for (i, a) in self.monomials.iter().enumerate() {
            for (j, b) in self.monomials.iter().enumerate() {
                g.set(i, j, a.times(b).sphere_moment::<R>());
            }
        }
        g
    }
}

/// Dimension of the degree-`≤ D` polynomial space on S³, `Σ (d+1)²`.
pub fn basis_dimension(degree: u32) -> usize {
    (0..=degree as usize).map(|d| (d + 1) * (d + 1)).sum()
}

pub fn make_basis(degree: u32) -> Basis {
    let mut monomials = Vec::with_capacity(basis_dimension(degree));
    for d in 0..=degree {
        for e3 in 0..=1.min(d) {
            let rest = d - e3;
            for a in (0..=rest).rev() {
                for b in (0..=rest - a).rev() {
                    let c = rest - a - b;
                    monomials.push(Monomial([a, b, c, e3]));
                }
            }
        }
    }
    let index = monomials.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    Basis {
        degree,
        monomials,
        index,
    }
}

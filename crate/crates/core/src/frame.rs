//! Quaternionic frame geometry of the unit 3-sphere.
//!
//! Points of S³ are unit quaternions `p = p₀ + p₁i + p₂j + p₃k`. The
//! left-invariant frame is `p ↦ (p·i, p·j, p·k)` and the right-invariant
//! frame is `p ↦ (i·p, j·p, k·p)`.
//!
//! The quaternion product used for the frames is the *conjugate* one
//! (`i·j = −k`). With Hamilton's product the left frame satisfies
//! `dη¹ = −2η²∧η³`; the conjugate product flips this to `dη¹ = 2η²∧η³`.
//! Two-forms on S³ are stored in the `(η¹∧η², η¹∧η³, η²∧η³)` basis with
//! `(η^j∧η^k)(e_j, e_k) = 1` for `j < k`.

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};

/// Multiplication table used for quaternion products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Handedness {
    /// `i·j = k`.
    Hamilton,
    /// `i·j = −k`; the opposite algebra of [`Handedness::Hamilton`].
    Conjugate,
}

/// Product used by every frame in this crate.
pub const FRAME_HANDEDNESS: Handedness = Handedness::Conjugate;

/// Quaternion units `i, j, k` as 4-vectors.
pub const UNITS: [[f64; 4]; 3] = [
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
];

impl Handedness {
    pub fn product(self, a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
        match self {
            Handedness::Hamilton => hamilton(a, b),
            Handedness::Conjugate => hamilton(b, a),
        }
    }
}

fn hamilton(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

/// Levi-Civita symbol on 0-based indices, `ε₀₁₂ = +1`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

/// Index pairs `(j, k)` with `j < k`, in storage order for 2-forms on S³.
pub const PAIRS3: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// A point of the unit 3-sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint([f64; 4]);

impl SpherePoint {
    /// Normalizes `coords` onto the sphere.
    pub fn new(coords: [f64; 4]) -> Result<Self> {
        let n = norm4(&coords);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::AtOrigin(coords));
        }
        Ok(Self(coords.map(|c| c / n)))
    }

    pub fn identity() -> Self {
        Self([1.0, 0.0, 0.0, 0.0])
    }

    pub fn coords(&self) -> [f64; 4] {
        self.0
    }
}

/// Which one-sided multiplication generates a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    /// `X_i(p) = p·q_i`, invariant under left translations.
    Left,
    /// `Y_i(p) = q_i·p`, invariant under right translations.
    Right,
}

/// Three tangent vectors at a point of S³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTriple {
    pub base: [f64; 4],
    pub vectors: [[f64; 4]; 3],
}

impl FrameTriple {
    pub fn gram(&self) -> [[f64; 3]; 3] {
        let mut g = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                g[a][b] = dot4(&self.vectors[a], &self.vectors[b]);
            }
        }
        g
    }

    /// Largest deviation from orthonormality, including orthogonality to
    /// the base point.
    pub fn orthonormality_residual(&self) -> f64 {
        let g = self.gram();
        let mut r: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let target = if a == b { 1.0 } else { 0.0 };
                r = r.max((g[a][b] - target).abs());
            }
            r = r.max(dot4(&self.vectors[a], &self.base).abs());
        }
        r
    }
}

pub fn left_frame_at(p: &SpherePoint) -> FrameTriple {
    frame_at(p, FrameKind::Left)
}

pub fn right_frame_at(p: &SpherePoint) -> FrameTriple {
    frame_at(p, FrameKind::Right)
}

pub fn frame_at(p: &SpherePoint, kind: FrameKind) -> FrameTriple {
    let x = p.coords();
    FrameTriple {
        base: x,
        vectors: [0, 1, 2].map(|i| frame_vector(kind, i, x)),
    }
}

/// Frame field `i` evaluated at an arbitrary point of ℝ⁴ (the fields are
/// linear, so this is also their extension off the sphere).
pub fn frame_vector(kind: FrameKind, axis: usize, x: [f64; 4]) -> [f64; 4] {
    let q = UNITS[axis];
    match kind {
        FrameKind::Left => FRAME_HANDEDNESS.product(x, q),
        FrameKind::Right => FRAME_HANDEDNESS.product(q, x),
    }
}

/// Matrix `M` of the linear vector field, `X(x) = M x`.
pub fn field_matrix(kind: FrameKind, axis: usize, handedness: Handedness) -> Matrix4<f64> {
    let q = UNITS[axis];
    let mut m = Matrix4::zeros();
    for col in 0..4 {
        let mut e = [0.0; 4];
        e[col] = 1.0;
        let v = match kind {
            FrameKind::Left => handedness.product(e, q),
            FrameKind::Right => handedness.product(q, e),
        };
        for row in 0..4 {
            m[(row, col)] = v[row];
        }
    }
    m
}

/// Integer matrix of a frame field under [`FRAME_HANDEDNESS`].
pub fn field_matrix_int(kind: FrameKind, axis: usize) -> [[i64; 4]; 4] {
    let m = field_matrix(kind, axis, FRAME_HANDEDNESS);
    let mut out = [[0i64; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = m[(r, c)].round() as i64;
        }
    }
    out
}

/// `c[i][j][k] = dη^i(X_j, X_k)` at `p`, from the exact brackets of the
/// linear fields: `[X_A, X_B](x) = (B·A − A·B) x` and
/// `dη^i(X_j, X_k) = −η^i([X_j, X_k])`.
pub fn structure_constants(
    p: &SpherePoint,
    kind: FrameKind,
    handedness: Handedness,
) -> [[[f64; 3]; 3]; 3] {
    let x = Vector4::from(p.coords());
    let mats = [0, 1, 2].map(|i| field_matrix(kind, i, handedness));
    let fields = mats.map(|m| m * x);
    let mut c = [[[0.0; 3]; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            let bracket = (mats[k] * mats[j] - mats[j] * mats[k]) * x;
            for i in 0..3 {
                c[i][j][k] = -fields[i].dot(&bracket);
            }
        }
    }
    c
}

/// Deviation of `dη^i(X_j, X_k)` from `sign · 2ε^i_{jk}`, the value implied
/// by `dη^i = sign · ε^i_{jk} η^j∧η^k`.
pub fn structure_residual_with(
    p: &SpherePoint,
    kind: FrameKind,
    handedness: Handedness,
    sign: f64,
) -> f64 {
    let c = structure_constants(p, kind, handedness);
    let mut r: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let want = sign * 2.0 * levi_civita(i, j, k) as f64;
                r = r.max((c[i][j][k] - want).abs());
            }
        }
    }
    r
}

/// Residual of `dη^i = ε^i_{jk} η^j∧η^k` for the left frame.
pub fn structure_residual(p: &SpherePoint) -> f64 {
    structure_residual_with(p, FrameKind::Left, FRAME_HANDEDNESS, 1.0)
}

/// Hodge star on S³ in frame components.
///
/// Degree 1 maps `α_i η^i` to the `(12, 13, 23)` basis; degree 2 maps back.
pub fn hodge_star_s3(form: [f64; 3], degree: usize) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    match degree {
        1 => {
            for (slot, &(j, k)) in PAIRS3.iter().enumerate() {
                for (i, a) in form.iter().enumerate() {
                    out[slot] += levi_civita(i, j, k) as f64 * a;
                }
            }
        }
        2 => {
            for (i, o) in out.iter_mut().enumerate() {
                for (slot, &(j, k)) in PAIRS3.iter().enumerate() {
                    *o += levi_civita(i, j, k) as f64 * form[slot];
                }
            }
        }
        d => return Err(Error::InvalidDegree(d)),
    }
    Ok(out)
}

pub(crate) fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm4(a: &[f64; 4]) -> f64 {
    dot4(a, a).sqrt()
}

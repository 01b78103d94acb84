use serde::Serialize;

use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

use super::{make_basis, Basis, CoframeField, PolyScalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Div,
    Curl,
    StarD,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Div => "div",
            OperatorKind::Curl => "curl",
            OperatorKind::StarD => "star_d",
        }
    }
}

/// Matrix of a first-order operator on the degree-`≤ D` coframe space.
///
/// Columns are indexed by `(axis, monomial)` with axis-major order, matching
/// [`CoframeField::to_vector`]. Rows use the same layout for `curl` and
/// `star_d`, and the scalar basis for `div`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix<R> {
    pub kind: OperatorKind,
    pub basis: Basis,
    pub matrix: DenseMatrix<R>,
    /// Block-diagonal Gram matrix of the domain, in units of π².
    pub gram: DenseMatrix<R>,
}

pub fn operator_matrix<R: Scalar>(kind: OperatorKind, degree: u32) -> OperatorMatrix<R> {
    let basis = make_basis(degree);
    let n = basis.len();
    let mut columns = Vec::with_capacity(3 * n);
    for axis in 0..3 {
        for m in basis.monomials() {
            let mut field = CoframeField::<R>::zero();
            field.alpha[axis] = PolyScalar::monomial(*m, R::one());
            let col = match kind {
                OperatorKind::Div => basis.coordinates(&field.div()),
                OperatorKind::Curl => field.curl().to_vector(&basis),
                OperatorKind::StarD => field.star_d().to_vector(&basis),
            };
            columns.push(col);
        }
    }
    let rows = if kind == OperatorKind::Div { n } else { 3 * n };
    let matrix = DenseMatrix::from_columns(rows, &columns);
    let gram = block_gram(&basis);
    OperatorMatrix {
        kind,
        basis,
        matrix,
        gram,
    }
}

/// Three copies of the scalar Gram matrix on the diagonal.
pub fn block_gram<R: Scalar>(basis: &Basis) -> DenseMatrix<R> {
    let g = basis.gram_pi2::<R>();
    let n = basis.len();
    let mut out = DenseMatrix::zeros(3 * n, 3 * n);
    for b in 0..3 {
        for i in 0..n {
            for j in 0..n {
                out.set(b * n + i, b * n + j, g.get(i, j).clone());
            }
        }
    }
    out
}

#[derive(Serialize)]
struct MatrixDump {
    operator: &'static str,
    degree: u32,
    rows: usize,
    cols: usize,
    /// Exponents `[a, b, c, d]` of the scalar basis, in column order per axis.
    basis: Vec<[u32; 4]>,
    /// Nonzero entries as `[row, col, value]`.
    entries: Vec<(usize, usize, f64)>,
}

impl<R: Scalar> OperatorMatrix<R> {
    pub fn degree(&self) -> u32 {
        self.basis.degree()
    }

    fn nonzero_entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for r in 0..self.matrix.rows() {
            for c in 0..self.matrix.cols() {
                let v = self.matrix.get(r, c);
                if !v.is_zero() {
                    out.push((r, c, v.to_f64()));
                }
            }
        }
        out
    }

    /// Sparse JSON dump: `{operator, degree, rows, cols, basis, entries}`.
    pub fn to_json(&self) -> serde_json::Value {
        let dump = MatrixDump {
            operator: self.kind.name(),
            degree: self.degree(),
            rows: self.matrix.rows(),
            cols: self.matrix.cols(),
            basis: self.basis.monomials().iter().map(|m| m.0).collect(),
            entries: self.nonzero_entries(),
        };
        serde_json::to_value(dump).expect("matrix dump serializes")
    }

    /// Sparse CSV dump with header `row,col,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,value\n");
        for (r, c, v) in self.nonzero_entries() {
            s.push_str(&format!("{r},{c},{v:.17e}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    type Q = Rational;

    #[test]
    fn div_kills_constants() {
        let op = operator_matrix::<Q>(OperatorKind::Div, 0);
        assert_eq!(op.matrix.rows(), 1);
        assert_eq!(op.matrix.cols(), 3);
        assert!((0..3).all(|c| *op.matrix.get(0, c) == ratio(0, 1)));
    }

    #[test]
    fn star_d_on_constants_is_two() {
        let op = operator_matrix::<Q>(OperatorKind::StarD, 0);
        assert_eq!(op.matrix, DenseMatrix::identity(3).map(|v: &Q| v.clone() * ratio(2, 1)));
        assert_eq!(op.matrix.shifted(&ratio(2, 1)).nullity(), 3);
    }

    #[test]
    fn star_d_is_curl_plus_two() {
        let d = 2;
        let curl = operator_matrix::<Q>(OperatorKind::Curl, d).matrix;
        let star = operator_matrix::<Q>(OperatorKind::StarD, d).matrix;
        assert_eq!(curl.shifted(&ratio(-2, 1)), star);
    }

    #[test]
    fn star_d_is_self_adjoint_on_divergence_free_fields() {
        let d = 2;
        let div = operator_matrix::<Q>(OperatorKind::Div, d);
        let star = operator_matrix::<Q>(OperatorKind::StarD, d);
        let k = div.matrix.nullspace().basis;
        let lhs = k.transpose().mul(&star.gram).mul(&star.matrix).mul(&k);
        assert_eq!(lhs, lhs.transpose());
    }

    #[test]
    fn float_and_exact_rings_agree() {
        let exact = operator_matrix::<Q>(OperatorKind::Curl, 2).matrix;
        let float = operator_matrix::<f64>(OperatorKind::Curl, 2).matrix;
        let diff = exact.map(|v| v.to_f64());
        for r in 0..diff.rows() {
            for c in 0..diff.cols() {
                assert!((diff.get(r, c) - float.get(r, c)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dumps_are_consistent() {
        let op = operator_matrix::<Q>(OperatorKind::StarD, 0);
        let json = op.to_json();
        assert_eq!(json["operator"], "star_d");
        assert_eq!(json["entries"].as_array().unwrap().len(), 3);
        assert_eq!(op.to_csv().lines().count(), 4);
    }
}

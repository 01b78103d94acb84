//! Dense matrices over a [`Scalar`] ring with row reduction, and the
//! generalized symmetric eigenproblem for the floating ring.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Scalar> DenseMatrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![R::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, R::one());
        }
        m
    }

    pub fn from_columns(rows: usize, columns: &[Vec<R>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (r, v) in col.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &R {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: R) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<R> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(r, c).clone() + a.clone() * b.clone();
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[R]) -> Vec<R> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                (0..self.cols).fold(R::zero(), |acc, c| {
                    let a = self.get(r, c);
                    if a.is_zero() || v[c].is_zero() {
                        acc
                    } else {
                        acc + a.clone() * v[c].clone()
                    }
                })
            })
            .collect()
    }

    /// Subtracts `shift` from the diagonal.
    pub fn shifted(&self, shift: &R) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let v = m.get(i, i).clone() - shift.clone();
            m.set(i, i, v);
        }
        m
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&R) -> S) -> DenseMatrix<S> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn scale_hint(&self) -> f64 {
        self.data.iter().map(|v| v.magnitude()).fold(0.0, f64::max)
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let scale = self.scale_hint();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            // Exact rings take the first nonzero; floats take the largest.
            let mut best = None;
            let mut best_mag = 0.0;
            for r in row..m.rows {
                let v = m.get(r, col);
                if v.is_negligible(scale) {
                    continue;
                }
                let mag = v.magnitude();
                if best.is_none() || (!R::EXACT && mag > best_mag) {
                    best = Some(r);
                    best_mag = mag;
                    if R::EXACT {
                        break;
                    }
                }
            }
            let Some(p) = best else { continue };
            if p != row {
                for c in 0..m.cols {
                    m.data.swap(p * m.cols + c, row * m.cols + c);
                }
            }
            let inv = R::one() / m.get(row, col).clone();
            for c in col..m.cols {
                let v = m.get(row, c).clone() * inv.clone();
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let pv = m.get(row, c).clone();
                    if pv.is_zero() {
                        continue;
                    }
                    let v = m.get(r, c).clone() - f.clone() * pv;
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Kernel basis from the RREF; each vector is `1` on its own free column
    /// and `0` on the other free columns.
    pub fn nullspace(&self) -> Nullspace<R> {
        let (rref, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let columns: Vec<Vec<R>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![R::zero(); self.cols];
                v[f] = R::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -rref.get(row, f).clone();
                }
                v
            })
            .collect();
        Nullspace {
            basis: DenseMatrix::from_columns(self.cols, &columns),
            free_columns: free,
        }
    }
}

impl DenseMatrix<f64> {
    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Kernel of a matrix with the coordinate chart given by its free columns.
#[derive(Debug, Clone)]
pub struct Nullspace<R> {
    /// Basis vectors as columns.
    pub basis: DenseMatrix<R>,
    /// A kernel vector's coordinates in `basis` are its entries here.
    pub free_columns: Vec<usize>,
}

impl<R: Scalar> Nullspace<R> {
    pub fn dim(&self) -> usize {
        self.free_columns.len()
    }

    /// Coordinates of a vector known to lie in the kernel.
    pub fn coordinates(&self, v: &[R]) -> Vec<R> {
        self.free_columns.iter().map(|&c| v[c].clone()).collect()
    }
}

/// Solution of `B v = λ G v` with `B` symmetric and `G` symmetric positive
/// definite; eigenvectors are `G`-orthonormal and sorted by eigenvalue.
#[derive(Debug, Clone)]
pub struct GeneralizedEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    /// `‖B − Bᵀ‖_max / ‖B‖_max` before symmetrization.
    pub asymmetry: f64,
}

pub fn generalized_symmetric_eigen(b: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<GeneralizedEigen> {
    let n = b.nrows();
    if b.ncols() != n || g.nrows() != n || g.ncols() != n {
        return Err(Error::EigenSolver("matrix shapes differ".into()));
    }
    let scale = b.amax().max(f64::MIN_POSITIVE);
    let asymmetry = (b - b.transpose()).amax() / scale;
    let sym = (b + b.transpose()) * 0.5;
    let gsym = (g + g.transpose()) * 0.5;
    let chol = gsym
        .cholesky()
        .ok_or_else(|| Error::EigenSolver("Gram matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::EigenSolver("singular Cholesky factor".into()))?;
    let s = &linv * sym * linv.transpose();
    let s = (&s + s.transpose()) * 0.5;
    let eig = s.symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenSolver("non-finite eigenvalue".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let back = linv.transpose() * &eig.eigenvectors;
    let mut vectors = DMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let col: DVector<f64> = back.column(src).into_owned();
        vectors.set_column(dst, &col);
    }
    Ok(GeneralizedEigen {
        values,
        vectors,
        asymmetry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn q(n: i64) -> Rational {
        ratio(n, 1)
    }

    #[test]
    fn exact_rank_and_nullspace() {
        let m = DenseMatrix::from_columns(
            2,
            &[vec![q(1), q(2)], vec![q(2), q(4)], vec![q(0), q(1)]],
        );
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.dim(), 1);
        let v = ns.basis.column(0);
        assert!(m.mul_vec(&v).iter().all(|x| *x == q(0)));
        assert_eq!(ns.coordinates(&v), vec![q(1)]);
    }

    #[test]
    fn float_rank_ignores_roundoff() {
        let m = DenseMatrix::from_columns(
            3,
            &[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0 + 1e-15], vec![0.0, 1.0, 1.0]],
        );
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn generalized_eigen_small() {
        let b = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let e = generalized_symmetric_eigen(&b, &g).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        let v = e.vectors.column(0);
        assert!(((v.transpose() * &g * v)[(0, 0)] - 1.0).abs() < 1e-14);
    }
}

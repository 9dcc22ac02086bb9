//! Dense linear algebra used by both solvers.
//!
//! Vectors are plain `Vec<f64>` / `&[f64]`; matrices are row-major
//! [`DenseMatrix`] values. The only factorization is a Cholesky factor of a
//! symmetric positive definite matrix, computed once and reused for every
//! right-hand side.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{check_dim, Error, Result};

/// Absolute tolerance on `|m[i][j] - m[j][i]|` accepted by [`SpdFactor::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A dense matrix stored in row-major order: `data[i * cols + j] = M[i, j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dim("matrix data", rows * cols, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "row {i} has {} columns, expected {ncols}", row.len());
            data.extend_from_slice(row);
        }
        Self {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    /// Returns `M x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim("matvec", self.cols, x.len())?;
        let mut out = vec![0.0; self.rows];
        self.matvec_into(x, &mut out);
        Ok(out)
    }

    /// Returns `Mᵀ y`.
    pub fn adjoint_matvec(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim("adjoint matvec", self.rows, y.len())?;
        let mut out = vec![0.0; self.cols];
        self.adjoint_matvec_into(y, &mut out);
        Ok(out)
    }

    /// `out = M x` without dimension checks beyond debug assertions.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    /// `out = Mᵀ y` without dimension checks beyond debug assertions.
    pub fn adjoint_matvec_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                axpy(yi, self.row(i), out);
            }
        }
    }

    /// Returns `Mᵀ M`.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for k in 0..self.rows {
            let r = self.row(k);
            for i in 0..n {
                if r[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    g.data[i * n + j] += r[i] * r[j];
                }
            }
        }
        g
    }

    /// Returns `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim("matrix add (rows)", self.rows, other.rows)?;
        check_dim("matrix add (cols)", self.cols, other.cols)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Largest `|M[i,j] - M[j,i]|` together with its location.
    pub fn asymmetry(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let d = (self.get(i, j) - self.get(j, i)).abs();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }

    /// Smallest eigenvalue of the symmetric part.
    pub fn min_symmetric_eigenvalue(&self) -> f64 {
        if self.rows == 0 {
            return 0.0;
        }
        let m = self.to_nalgebra_symmetrized();
        m.symmetric_eigenvalues().min()
    }

    /// Power-iteration estimate of the spectral norm `‖M‖₂`.
    ///
    /// Deterministic: starts from the all-ones vector and runs a fixed number
    /// of iterations on `MᵀM`.
    pub fn spectral_norm_estimate(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let mut w = vec![1.0 / (self.cols as f64).sqrt(); self.cols];
        let mut mw = vec![0.0; self.rows];
        let mut est = 0.0;
        for _ in 0..200 {
            self.matvec_into(&w, &mut mw);
            self.adjoint_matvec_into(&mw, &mut w);
            let nrm = norm2(&w);
            if nrm == 0.0 {
                // start vector in the null space; fall back to the Frobenius bound
                return frobenius(&self.data);
            }
            let next = nrm.sqrt();
            w.iter_mut().for_each(|v| *v /= nrm);
            if (next - est).abs() <= 1e-14 * next {
                est = next;
                break;
            }
            est = next;
        }
        est
    }

    fn to_nalgebra_symmetrized(&self) -> DMatrix<f64> {
        let n = self.rows;
        DMatrix::from_fn(n, n, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)))
    }
}

/// Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    chol: Cholesky<f64, Dyn>,
}

impl SpdFactor {
    /// Factors `M` after symmetrizing it as `(M + Mᵀ)/2`.
    ///
    /// Fails if `M` is not square, not symmetric within [`SYMMETRY_TOL`], or
    /// not positive definite.
    pub fn new(m: &DenseMatrix) -> Result<Self> {
        check_dim("spd factor (square)", m.rows, m.cols)?;
        let (diff, row, col) = m.asymmetry();
        if diff > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { row, col, diff });
        }
        let sym = m.to_nalgebra_symmetrized();
        // nalgebra only reports failure, so locate the first bad pivot ourselves
        // for the error message.
        match Cholesky::new(sym) {
            Some(chol) => Ok(Self { chol }),
            None => Err(Error::NotPositiveDefinite {
                pivot: first_bad_pivot(m),
            }),
        }
    }

    pub fn order(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    /// Solves `M s = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_dim("spd solve", self.order(), b.len())?;
        let mut out = b.to_vec();
        self.solve_in_place(&mut out);
        Ok(out)
    }

    /// Overwrites `b` with `M⁻¹ b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        debug_assert_eq!(b.len(), self.order());
        let mut rhs = DVector::from_column_slice(b);
        self.chol.solve_mut(&mut rhs);
        b.copy_from_slice(rhs.as_slice());
    }

    /// Reassembles `L Lᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let m = self.chol.l() * self.chol.l().transpose();
        let n = m.nrows();
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, m[(i, j)]);
            }
        }
        out
    }
}

fn first_bad_pivot(m: &DenseMatrix) -> usize {
    let n = m.rows;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = 0.5 * (m.get(j, j) + m.get(j, j));
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return j;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = 0.5 * (m.get(i, j) + m.get(j, i));
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    n
}

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `y += a x`
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

#[inline]
pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn scaled(a: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| a * v).collect()
}

fn frobenius(x: &[f64]) -> f64 {
    norm2(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn matvec_examples() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(m.matvec(&[1.0, 1.0]).unwrap(), vec![3.0, 7.0]);
        assert_eq!(DenseMatrix::identity(3).matvec(&[5.0, -2.0, 0.0]).unwrap(), vec![5.0, -2.0, 0.0]);
        let z = DenseMatrix::from_rows(&[&[0.0, 0.0]]);
        assert_eq!(z.matvec(&[9.0, 9.0]).unwrap(), vec![0.0]);
        assert!(matches!(m.matvec(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn adjoint_matvec_examples() {
        let m = DenseMatrix::from_rows(&[&[1.0], &[1.0]]);
        assert_eq!(m.adjoint_matvec(&[1.0, -1.0]).unwrap(), vec![0.0]);
        assert_eq!(DenseMatrix::identity(2).adjoint_matvec(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
        let d = DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 3.0]]);
        assert_eq!(d.adjoint_matvec(&[1.0, 1.0]).unwrap(), vec![2.0, 3.0]);
        assert!(d.adjoint_matvec(&[1.0]).is_err());
    }

    #[test]
    fn spd_examples() {
        let f = SpdFactor::new(&DenseMatrix::from_rows(&[&[4.0]])).unwrap();
        assert_abs_diff_eq!(f.solve(&[8.0]).unwrap()[0], 2.0, epsilon = 1e-15);

        let f = SpdFactor::new(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(f.solve(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);

        let m = DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let s = SpdFactor::new(&m).unwrap().solve(&[3.0, 3.0]).unwrap();
        // multiply back
        let back = m.matvec(&s).unwrap();
        assert_abs_diff_eq!(back[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(back[1], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[1], 1.0, epsilon = 1e-12);
        assert!(SpdFactor::new(&DenseMatrix::identity(2)).unwrap().solve(&[1.0]).is_err());
    }

    #[test]
    fn spd_rejects_bad_input() {
        let nonsym = DenseMatrix::from_rows(&[&[2.0, 1.0], &[0.0, 2.0]]);
        assert!(matches!(SpdFactor::new(&nonsym), Err(Error::NotSymmetric { .. })));
        let indefinite = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(
            SpdFactor::new(&indefinite),
            Err(Error::NotPositiveDefinite { pivot: 1 })
        ));
        let tiny_noise = DenseMatrix::from_rows(&[&[2.0, 1.0 + 1e-13], &[1.0, 2.0]]);
        assert!(SpdFactor::new(&tiny_noise).is_ok());
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let d = DenseMatrix::from_rows(&[&[3.0, 0.0], &[0.0, -5.0]]);
        assert_abs_diff_eq!(d.spectral_norm_estimate(), 5.0, epsilon = 1e-9);
    }
}

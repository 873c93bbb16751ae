use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use super::{Quaternion, Scalar};
use crate::error::{Error, Result};

/// Dense column-major matrix over a field.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row vectors, which must all have equal length.
    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row {} has {} entries, expected {cols}",
                bad + 1,
                rows[bad].len()
            )));
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = S> + '_ {
        (0..self.cols).map(move |j| self[(i, j)])
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).collect()).collect()
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Matrix product; entries multiply left-to-right, which matters for
    /// quaternions.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                acc += self[(i, k)] * rhs[(k, j)];
            }
            acc
        })
    }

    /// `A^† A`, the Gram matrix of the columns.
    pub fn gram_columns(&self) -> Self {
        Self::from_fn(self.cols, self.cols, |j, k| {
            let mut acc = S::zero();
            for i in 0..self.rows {
                acc += self[(i, j)].conj() * self[(i, k)];
            }
            acc
        })
    }

    /// Copy of the block with rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Largest real part on the diagonal.
    pub fn max_diag(&self) -> f64 {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].re())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// First `(i, j)` with `|m_ij - conj(m_ji)| > tol`, if any.
    pub fn hermitian_violation(&self, tol: f64) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        for j in 0..self.cols {
            for i in j..self.rows {
                if (self[(i, j)] - self[(j, i)].conj()).abs() > tol {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.cols).all(|j| (0..j.min(self.rows)).all(|i| self[(i, j)] == S::zero()))
    }

    /// Replaces each diagonal entry by its real part.
    pub fn realify_diagonal(&mut self) {
        for i in 0..self.rows.min(self.cols) {
            let d = self[(i, i)].re();
            self[(i, i)] = S::from_real(d);
        }
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i + j * self.rows]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i + j * self.rows]
    }
}

/// Replaces every quaternion entry by its 2×2 complex block.
pub fn embed_quaternion_matrix(m: &Matrix<Quaternion>) -> Matrix<Complex64> {
    Matrix::from_fn(2 * m.rows(), 2 * m.cols(), |i, j| {
        m[(i / 2, j / 2)].to_block()[i % 2][j % 2]
    })
}

/// Inverse of [`embed_quaternion_matrix`]. Fails if the complex matrix does
/// not have quaternion block structure to within `tol`.
pub fn extract_quaternion_matrix(m: &Matrix<Complex64>, tol: f64) -> Result<Matrix<Quaternion>> {
    if !m.rows().is_multiple_of(2) || !m.cols().is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "complex matrix {}x{} has odd size",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = Matrix::zeros(m.rows() / 2, m.cols() / 2);
    for i in 0..out.rows() {
        for j in 0..out.cols() {
            let block = [
                [m[(2 * i, 2 * j)], m[(2 * i, 2 * j + 1)]],
                [m[(2 * i + 1, 2 * j)], m[(2 * i + 1, 2 * j + 1)]],
            ];
            out[(i, j)] = Quaternion::from_block(&block, tol)
                .ok_or_else(|| Error::Dimension(format!("block ({}, {}) lacks quaternion structure", i + 1, j + 1)))?;
        }
    }
    Ok(out)
}

//! Cholesky factorisation, Schur complements and partial correlations.

use std::fmt;

use thiserror::Error;

use super::{Matrix, Scalar};
use crate::error::{Error, Result};

/// Relative pivot floor: a pivot must exceed this times the largest diagonal
/// entry.
pub const PIVOT_FLOOR: f64 = 1e-12;

/// Tolerance on diagonal entries of a correlation matrix.
pub const UNIT_DIAGONAL_TOL: f64 = 1e-12;

/// Lower-triangular factor with real, strictly positive diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct CholeskyFactor<S>(Matrix<S>);

/// Hermitian positive-definite matrix with unit diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix<S>(Matrix<S>);

/// First condition a candidate correlation matrix fails.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Violation {
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("entry ({row}, {col}) is not the conjugate of its transpose")]
    NotHermitian { row: usize, col: usize },
    #[error("diagonal entry {index} is {value}, not 1")]
    DiagonalNotUnit { index: usize, value: f64 },
    #[error("leading minor {index} is not positive definite")]
    NotPositiveDefinite { index: usize },
}

/// Cholesky factorisation `m = L L^†` of a Hermitian matrix.
///
/// Only the lower triangle of `m` is read. Pivots at or below
/// `PIVOT_FLOOR × max diag` are rejected, reporting the 1-based index of the
/// failing leading minor.
pub fn cholesky_decompose<S: Scalar>(m: &Matrix<S>) -> Result<CholeskyFactor<S>> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::Dimension(format!(
            "Cholesky needs a non-empty square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.dim();
    let floor = PIVOT_FLOOR * m.max_diag().max(0.0);
    let mut l = Matrix::<S>::zeros(n, n);
    for j in 0..n {
        let mut pivot = m[(j, j)].re();
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if !(pivot > floor) {
            return Err(Error::NotPositiveDefinite { index: j + 1, pivot });
        }
        let d = pivot.sqrt();
        l[(j, j)] = S::from_real(d);
        let inv = 1.0 / d;
        for i in (j + 1)..n {
            let mut acc = m[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc.scale(inv);
        }
    }
    Ok(CholeskyFactor(l))
}

/// `L L^†` for a lower-triangular `L`.
pub fn gram<S: Scalar>(l: &CholeskyFactor<S>) -> Matrix<S> {
    let l = l.as_matrix();
    let n = l.dim();
    let mut out = Matrix::<S>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut acc = S::zero();
            for k in 0..=j {
                acc += l[(i, k)] * l[(j, k)].conj();
            }
            out[(i, j)] = acc;
            out[(j, i)] = acc.conj();
        }
    }
    out.realify_diagonal();
    out
}

/// Schur complement `S/S₁₁ = S₂₂ − S₂₁ S₁₁⁻¹ S₁₂` with `S₁₁` the leading
/// `(p−1)×(p−1)` block; `p` is 1-based and `p = 1` returns `s` unchanged.
///
/// Evaluated as `S₂₂ − X^† X` with `X = L₁₁⁻¹ S₁₂` from the Cholesky factor
/// of the leading block.
pub fn schur_complement<S: Scalar>(s: &Matrix<S>, p: usize) -> Result<Matrix<S>> {
    if !s.is_square() {
        return Err(Error::Dimension(format!("{}x{} is not square", s.rows(), s.cols())));
    }
    let n = s.dim();
    if p == 0 || p > n {
        return Err(Error::Usage(format!("Schur index p = {p} outside 1..={n}")));
    }
    if p == 1 {
        return Ok(s.clone());
    }
    let m = p - 1;
    let lead = cholesky_decompose(&s.block(0, m, 0, m)).map_err(|e| match e {
        Error::NotPositiveDefinite { index, .. } => Error::Degenerate {
            level: index,
            reason: "leading block of the Schur complement is singular".into(),
        },
        other => other,
    })?;
    let l = lead.as_matrix();
    let q = n - m;
    // forward substitution L X = S₁₂, column by column
    let mut x = Matrix::<S>::zeros(m, q);
    for c in 0..q {
        for i in 0..m {
            let mut acc = s[(i, m + c)];
            for k in 0..i {
                acc -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = acc.scale(1.0 / l[(i, i)].re());
        }
    }
    let mut out = Matrix::<S>::zeros(q, q);
    for j in 0..q {
        for k in 0..q {
            let mut acc = s[(m + j, m + k)];
            for i in 0..m {
                acc -= x[(i, j)].conj() * x[(i, k)];
            }
            out[(j, k)] = acc;
        }
    }
    out.realify_diagonal();
    Ok(out)
}

/// Matrix of partial correlations given variables `1..p−1`, indexed over
/// variables `p..N` (so entry `(0, 0)` is variable `p`).
pub fn partial_corr_from_schur<S: Scalar>(r: &CorrelationMatrix<S>, p: usize) -> Result<Matrix<S>> {
    let sc = schur_complement(r.as_matrix(), p)?;
    normalise_covariance(&sc, PIVOT_FLOOR * r.as_matrix().max_diag(), p)
}

/// `σ_jk / √(σ_jj σ_kk)` with an exactly unit diagonal. `level` is only used
/// in the error.
pub(crate) fn normalise_covariance<S: Scalar>(c: &Matrix<S>, floor: f64, level: usize) -> Result<Matrix<S>> {
    let q = c.dim();
    let mut inv_sd = Vec::with_capacity(q);
    for i in 0..q {
        let d = c[(i, i)].re();
        if !(d > floor) {
            return Err(Error::Degenerate {
                level,
                reason: format!("conditional variance of variable {} is {d:e}", i + 1),
            });
        }
        inv_sd.push(1.0 / d.sqrt());
    }
    let mut out = Matrix::from_fn(q, q, |j, k| c[(j, k)].scale(inv_sd[j] * inv_sd[k]));
    for i in 0..q {
        out[(i, i)] = S::one();
    }
    Ok(out)
}

/// Checks unit diagonal, Hermitian symmetry and positive definiteness.
pub fn check_correlation<S: Scalar>(m: &Matrix<S>) -> Result<(), Violation> {
    if !m.is_square() {
        return Err(Violation::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.dim();
    if n == 0 {
        return Err(Violation::Empty);
    }
    for j in 0..n {
        for i in 0..n {
            if !m[(i, j)].is_finite() {
                return Err(Violation::NonFinite { row: i + 1, col: j + 1 });
            }
        }
    }
    for i in 0..n {
        let d = m[(i, i)];
        if (d - S::one()).abs() > UNIT_DIAGONAL_TOL {
            return Err(Violation::DiagonalNotUnit {
                index: i + 1,
                value: d.re(),
            });
        }
    }
    if let Some((i, j)) = m.hermitian_violation(UNIT_DIAGONAL_TOL) {
        return Err(Violation::NotHermitian { row: i + 1, col: j + 1 });
    }
    match cholesky_decompose(m) {
        Ok(_) => Ok(()),
        Err(Error::NotPositiveDefinite { index, .. }) => Err(Violation::NotPositiveDefinite { index }),
        Err(_) => Err(Violation::Empty),
    }
}

pub fn is_valid_correlation<S: Scalar>(m: &Matrix<S>) -> bool {
    check_correlation(m).is_ok()
}

/// `ln det` of a Hermitian positive-definite matrix from its Cholesky
/// diagonal. For quaternion matrices this is the logarithm of the square root
/// of the determinant of the complex-block representation.
pub fn log_det<S: Scalar>(m: &Matrix<S>) -> Result<f64> {
    let l = cholesky_decompose(m)?;
    Ok(l.log_det())
}

impl<S: Scalar> CholeskyFactor<S> {
    /// Validates lower-triangular shape and a real, strictly positive diagonal.
    pub fn new(m: Matrix<S>) -> Result<Self> {
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::InvalidFactor(format!(
                "{}x{} is not a non-empty square",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_lower_triangular() {
            return Err(Error::InvalidFactor("entries above the diagonal are non-zero".into()));
        }
        for i in 0..m.dim() {
            let d = m[(i, i)];
            if (d - S::from_real(d.re())).abs() != 0.0 || !(d.re() > 0.0) {
                return Err(Error::InvalidFactor(format!(
                    "diagonal entry {} must be real and positive",
                    i + 1
                )));
            }
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: Matrix<S>) -> Self {
        debug_assert!(m.is_lower_triangular());
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.0
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| self.0[(i, i)].re().ln()).sum::<f64>()
    }

    /// Real coordinates of row `j` (0-based): `β` per off-diagonal entry
    /// followed by the diagonal entry.
    pub fn row_coordinates(&self, j: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(S::BETA * j + 1);
        for k in 0..j {
            let x = self.0[(j, k)];
            out.extend((0..S::BETA).map(|c| x.component(c)));
        }
        out.push(self.0[(j, j)].re());
        out
    }

    /// Largest deviation of a squared row norm from 1.
    pub fn max_row_norm_error(&self) -> f64 {
        (0..self.dim())
            .map(|j| {
                let sq: f64 = (0..=j).map(|k| self.0[(j, k)].norm_sqr()).sum();
                (sq - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

impl<S: Scalar> CorrelationMatrix<S> {
    pub fn new(m: Matrix<S>) -> Result<Self> {
        check_correlation(&m).map_err(Error::NotCorrelation)?;
        let mut m = m;
        for i in 0..m.dim() {
            m[(i, i)] = S::one();
        }
        Ok(Self(m))
    }

    /// `L L^†` for a factor with unit-norm rows (to within 1e-8), with the
    /// diagonal set to exactly 1.
    pub fn from_factor(l: &CholeskyFactor<S>) -> Result<Self> {
        let err = l.max_row_norm_error();
        if err > 1e-8 {
            return Err(Error::InvalidFactor(format!("row norms deviate from 1 by {err:e}")));
        }
        let mut m = gram(l);
        for i in 0..m.dim() {
            m[(i, i)] = S::one();
        }
        Ok(Self(m))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.0
    }

    pub fn cholesky(&self) -> Result<CholeskyFactor<S>> {
        cholesky_decompose(&self.0)
    }

    pub fn log_det(&self) -> Result<f64> {
        log_det(&self.0)
    }
}

impl<S: Scalar> fmt::Display for CorrelationMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            let row: Vec<String> = self.0.row(i).map(|x| format!("{x:?}")).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

//! Field scalars, dense matrices and the factorisations built on them.

mod decomp;
mod field;
mod json;
mod matrix;
mod quaternion;

pub(crate) use decomp::normalise_covariance;
pub use decomp::{
    check_correlation, cholesky_decompose, gram, is_valid_correlation, log_det, partial_corr_from_schur,
    schur_complement, CholeskyFactor, CorrelationMatrix, Violation, PIVOT_FLOOR, UNIT_DIAGONAL_TOL,
};
pub use field::{Field, Scalar};
pub use json::{MatrixJson, ScalarJson};
pub use matrix::{embed_quaternion_matrix, extract_quaternion_matrix, Matrix};
pub use num_complex::Complex64;
pub use quaternion::{ComplexBlock, Quaternion};

/// The 2×2 complex block of a quaternion scalar.
pub fn quaternion_embed(q: Quaternion) -> ComplexBlock {
    q.to_block()
}

//! Correlation matrices over the reals, complexes and quaternions: the
//! hyperspherical Cholesky parametrisation, partial correlations, the
//! `(det R)^a` family of densities and exact samplers for it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod error;
pub mod measures;
pub mod param;
pub mod quadrature;
pub mod sampling;
pub mod special;

pub use error::{Error, Result};

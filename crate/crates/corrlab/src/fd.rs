//! Finite-difference Jacobian of θ ↦ (real coordinates of the strict lower
//! triangle of R).

use corrlab_core::algebra::{gram, Scalar};
use corrlab_core::param::{angles_to_cholesky, AngleSet};
use nalgebra::DMatrix;

pub const FD_STEP: f64 = 1e-6;

/// Real components of `R_jk` for `j > k`, row-major, β per entry.
pub fn lower_coordinates<S: Scalar>(angles: &AngleSet<S>) -> Vec<f64> {
    let r = gram(&angles_to_cholesky(angles));
    let n = r.dim();
    let mut out = Vec::with_capacity(S::BETA * n * n.saturating_sub(1) / 2);
    for j in 1..n {
        for k in 0..j {
            out.extend((0..S::BETA).map(|c| r[(j, k)].component(c)));
        }
    }
    out
}

/// Central-difference Jacobian matrix with step `h`. Perturbed angles are
/// not re-validated, so `h` must keep them inside (0, π).
pub fn fd_jacobian<S: Scalar>(angles: &AngleSet<S>, h: f64) -> DMatrix<f64> {
    let theta = angles.as_slice();
    let d = theta.len();
    let n = angles.dim();
    let eval = |t: &[f64]| lower_coordinates(&AngleSet::<S>::from_flat(n, t.to_vec()).expect("interior step"));
    let mut jac = DMatrix::zeros(d, d);
    let mut t = theta.to_vec();
    for col in 0..d {
        t[col] = theta[col] + h;
        let plus = eval(&t);
        t[col] = theta[col] - h;
        let minus = eval(&t);
        t[col] = theta[col];
        for row in 0..d {
            jac[(row, col)] = (plus[row] - minus[row]) / (2.0 * h);
        }
    }
    jac
}

/// `|det J|` of the central-difference Jacobian.
pub fn fd_jacobian_abs_det<S: Scalar>(angles: &AngleSet<S>, h: f64) -> f64 {
    fd_jacobian(angles, h).determinant().abs()
}

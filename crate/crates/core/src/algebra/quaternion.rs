use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A quaternion stored as the pair `(z, w)` of its 2×2 complex block
///
/// ```text
///  [  z    w  ]
///  [ -w̄    z̄  ]
/// ```
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub z: Complex64,
    pub w: Complex64,
}

/// 2×2 complex matrix, row-major.
pub type ComplexBlock = [[Complex64; 2]; 2];

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion {
        z: Complex64::new(0.0, 0.0),
        w: Complex64::new(0.0, 0.0),
    };

    pub const fn new(z: Complex64, w: Complex64) -> Self {
        Self { z, w }
    }

    pub const fn from_parts(z_re: f64, z_im: f64, w_re: f64, w_im: f64) -> Self {
        Self {
            z: Complex64::new(z_re, z_im),
            w: Complex64::new(w_re, w_im),
        }
    }

    pub const fn from_real(x: f64) -> Self {
        Self::from_parts(x, 0.0, 0.0, 0.0)
    }

    /// `(z_re, z_im, w_re, w_im)`
    pub fn components(self) -> [f64; 4] {
        [self.z.re, self.z.im, self.w.re, self.w.im]
    }

    /// Quaternion conjugate; the conjugate transpose of the complex block.
    pub fn conj(self) -> Self {
        Self::new(self.z.conj(), -self.w)
    }

    /// |z|² + |w|², the determinant of the complex block.
    pub fn norm_sqr(self) -> f64 {
        self.z.norm_sqr() + self.w.norm_sqr()
    }

    pub fn to_block(self) -> ComplexBlock {
        [[self.z, self.w], [-self.w.conj(), self.z.conj()]]
    }

    /// Inverse of [`Quaternion::to_block`]; returns `None` when the block
    /// does not have quaternion structure to within `tol`.
    pub fn from_block(block: &ComplexBlock, tol: f64) -> Option<Self> {
        let z = block[0][0];
        let w = block[0][1];
        let ok = (block[1][0] + w.conj()).norm() <= tol && (block[1][1] - z.conj()).norm() <= tol;
        ok.then_some(Self::new(z, w))
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.z + rhs.z, self.w + rhs.w)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.z - rhs.z, self.w - rhs.w)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.z, -self.w)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    /// Product of the complex blocks, read off the top row.
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.z * rhs.z - self.w * rhs.w.conj(),
            self.z * rhs.w + self.w * rhs.z.conj(),
        )
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn block_mul(a: &ComplexBlock, b: &ComplexBlock) -> ComplexBlock {
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    #[test]
    fn embedding_examples() {
        let one = Quaternion::from_parts(1.0, 0.0, 0.0, 0.0).to_block();
        assert_eq!(one, [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
        let j = Quaternion::from_parts(0.0, 0.0, 1.0, 0.0).to_block();
        assert_eq!(j, [[c(0.0, 0.0), c(1.0, 0.0)], [c(-1.0, 0.0), c(0.0, 0.0)]]);
        let i = Quaternion::from_parts(0.0, 1.0, 0.0, 0.0).to_block();
        assert_eq!(i, [[c(0.0, 1.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]]);
    }

    #[test]
    fn non_quaternion_block_rejected() {
        let bad = [[c(1.0, 0.0), c(0.5, 0.0)], [c(0.5, 0.0), c(1.0, 0.0)]];
        assert!(Quaternion::from_block(&bad, 1e-12).is_none());
    }

    #[test]
    fn multiplication_is_not_commutative() {
        let i = Quaternion::from_parts(0.0, 1.0, 0.0, 0.0);
        let j = Quaternion::from_parts(0.0, 0.0, 1.0, 0.0);
        assert_eq!(i * j, -(j * i));
    }

    fn quat() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-2.0f64..2.0).prop_map(|p| Quaternion::from_parts(p[0], p[1], p[2], p[3]))
    }

    proptest! {
        #[test]
        fn block_roundtrip(q in quat()) {
            prop_assert_eq!(Quaternion::from_block(&q.to_block(), 0.0), Some(q));
        }

        #[test]
        fn product_matches_block_product(a in quat(), b in quat()) {
            let via_blocks = block_mul(&a.to_block(), &b.to_block());
            let direct = (a * b).to_block();
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((via_blocks[i][j] - direct[i][j]).norm() < 1e-12);
                }
            }
        }

        #[test]
        fn norm_is_multiplicative(a in quat(), b in quat()) {
            let lhs = (a * b).norm_sqr();
            let rhs = a.norm_sqr() * b.norm_sqr();
            prop_assert!((lhs - rhs).abs() < 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn conj_reverses_products(a in quat(), b in quat()) {
            let lhs = (a * b).conj();
            let rhs = b.conj() * a.conj();
            prop_assert!((lhs - rhs).norm_sqr() < 1e-24);
        }
    }
}

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Quaternion;

/// The division algebra a matrix lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
    Quaternion,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::Real, Field::Complex, Field::Quaternion];

    /// Number of real components per scalar: 1, 2 or 4.
    pub const fn beta(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
            Field::Quaternion => 4,
        }
    }

    pub const fn label(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
            Field::Quaternion => "quaternion",
        }
    }

    pub fn from_beta(beta: usize) -> Option<Field> {
        match beta {
            1 => Some(Field::Real),
            2 => Some(Field::Complex),
            4 => Some(Field::Quaternion),
            _ => None,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(Field::Real),
            "complex" | "c" => Ok(Field::Complex),
            "quaternion" | "q" => Ok(Field::Quaternion),
            other => Err(format!(
                "unknown field `{other}` (expected real, complex or quaternion)"
            )),
        }
    }
}

/// A scalar of one of the three fields.
///
/// Multiplication is not assumed commutative. Components are ordered
/// `(re)`, `(re, im)` and `(z_re, z_im, w_re, w_im)` respectively.
pub trait Scalar:
    Copy
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    const FIELD: Field;
    const BETA: usize = Self::FIELD.beta();

    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn one() -> Self {
        Self::from_real(1.0)
    }
    /// The real (first) component.
    fn re(self) -> f64;
    fn conj(self) -> Self;
    /// Sum of squares of all real components.
    fn norm_sqr(self) -> f64;
    fn abs(self) -> f64 {
        self.norm_sqr().sqrt()
    }
    /// Multiplication by a real number.
    fn scale(self, s: f64) -> Self;
    /// Component `i` in `0..BETA`.
    fn component(self, i: usize) -> f64;
    /// Builds a scalar from exactly `BETA` components.
    fn from_components(c: &[f64]) -> Self;

    fn is_finite(self) -> bool {
        (0..Self::BETA).all(|i| self.component(i).is_finite())
    }
}

impl Scalar for f64 {
    const FIELD: Field = Field::Real;

    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn re(self) -> f64 {
        self
    }
    fn conj(self) -> Self {
        self
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn component(self, i: usize) -> f64 {
        debug_assert_eq!(i, 0);
        self
    }
    fn from_components(c: &[f64]) -> Self {
        debug_assert_eq!(c.len(), 1);
        c[0]
    }
}

impl Scalar for Complex64 {
    const FIELD: Field = Field::Complex;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn scale(self, s: f64) -> Self {
        Complex64::new(self.re * s, self.im * s)
    }
    fn component(self, i: usize) -> f64 {
        match i {
            0 => self.re,
            1 => self.im,
            _ => panic!("complex component index {i} out of range"),
        }
    }
    fn from_components(c: &[f64]) -> Self {
        debug_assert_eq!(c.len(), 2);
        Complex64::new(c[0], c[1])
    }
}

impl Scalar for Quaternion {
    const FIELD: Field = Field::Quaternion;

    fn zero() -> Self {
        Quaternion::ZERO
    }
    fn from_real(x: f64) -> Self {
        Quaternion::from_real(x)
    }
    fn re(self) -> f64 {
        self.z.re
    }
    fn conj(self) -> Self {
        Quaternion::conj(self)
    }
    fn norm_sqr(self) -> f64 {
        Quaternion::norm_sqr(self)
    }
    fn scale(self, s: f64) -> Self {
        Quaternion::new(self.z * s, self.w * s)
    }
    fn component(self, i: usize) -> f64 {
        self.components()[i]
    }
    fn from_components(c: &[f64]) -> Self {
        debug_assert_eq!(c.len(), 4);
        Quaternion::from_parts(c[0], c[1], c[2], c[3])
    }
}

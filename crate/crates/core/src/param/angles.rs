use std::f64::consts::{FRAC_PI_2, PI};
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::algebra::{Field, Scalar};
use crate::error::{Error, Result};

/// Hyperspherical angles of a Cholesky factor over field `S`.
///
/// Row `j` (1-based, `2 ≤ j ≤ N`) holds `β(j−1)` angles, each strictly
/// inside `(0, π)`. Angles are stored row-major: `j` ascending, then slot
/// `p` ascending within a row.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleSet<S> {
    n: usize,
    angles: Vec<f64>,
    field: PhantomData<S>,
}

/// Number of angles in row `j` (1-based).
pub fn row_len(beta: usize, j: usize) -> usize {
    beta * (j - 1)
}

/// Total number of angles, `β N (N−1) / 2`.
pub fn angle_count(beta: usize, n: usize) -> usize {
    beta * n * n.saturating_sub(1) / 2
}

fn row_offset(beta: usize, j: usize) -> usize {
    beta * (j - 1) * (j.saturating_sub(2)) / 2
}

impl<S: Scalar> AngleSet<S> {
    /// Angles for rows `2..=n` flattened row-major.
    pub fn from_flat(n: usize, angles: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("dimension must be at least 1".into()));
        }
        let want = angle_count(S::BETA, n);
        if angles.len() != want {
            return Err(Error::Dimension(format!(
                "{} angle set of dimension {n} needs {want} angles, got {}",
                S::FIELD,
                angles.len()
            )));
        }
        let set = Self {
            n,
            angles,
            field: PhantomData,
        };
        for (j, p, theta) in set.slots() {
            if !(theta > 0.0 && theta < PI) {
                return Err(Error::AngleOutOfRange {
                    row: j,
                    slot: p,
                    value: theta,
                });
            }
        }
        Ok(set)
    }

    /// Builds from per-row vectors. Either `n − 1` rows (for `j = 2..=n`) or
    /// `n` rows with an empty first row are accepted.
    pub fn from_rows(n: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let rows = match rows.first() {
            Some(first) if rows.len() == n && first.is_empty() => &rows[1..],
            _ => rows,
        };
        if rows.len() != n.saturating_sub(1) {
            return Err(Error::Dimension(format!(
                "expected {} angle rows for dimension {n}, got {}",
                n.saturating_sub(1),
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            let j = i + 2;
            if row.len() != row_len(S::BETA, j) {
                return Err(Error::Dimension(format!(
                    "row {j} needs {} angles, got {}",
                    row_len(S::BETA, j),
                    row.len()
                )));
            }
        }
        Self::from_flat(n, rows.concat())
    }

    /// Every angle equal to `theta`.
    pub fn constant(n: usize, theta: f64) -> Result<Self> {
        Self::from_flat(n, vec![theta; angle_count(S::BETA, n)])
    }

    /// All angles π/2, the parametrisation of the identity matrix.
    pub fn neutral(n: usize) -> Self {
        Self::constant(n.max(1), FRAC_PI_2).expect("pi/2 is interior")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        S::FIELD
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.angles
    }

    /// Angles of row `j` (1-based).
    pub fn row(&self, j: usize) -> &[f64] {
        assert!((1..=self.n).contains(&j), "row {j} out of range");
        let start = row_offset(S::BETA, j);
        &self.angles[start..start + row_len(S::BETA, j)]
    }

    /// θ_{jp}, both indices 1-based.
    pub fn get(&self, j: usize, p: usize) -> f64 {
        self.row(j)[p - 1]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (2..=self.n).map(|j| self.row(j).to_vec()).collect()
    }

    /// `(j, p, θ_{jp})` in storage order.
    pub fn slots(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (2..=self.n).flat_map(move |j| self.row(j).iter().enumerate().map(move |(i, &t)| (j, i + 1, t)))
    }
}

/// Point on the unit sphere in `R^{d+1}` from `d` hyperspherical angles:
/// `x_m = cos θ_m ∏_{q<m} sin θ_q`, last coordinate `∏ sin θ_q`.
pub fn sphere_point(angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len() + 1);
    let mut radius = 1.0;
    for &t in angles {
        let (s, c) = t.sin_cos();
        out.push(c * radius);
        radius *= s;
    }
    out.push(radius);
    out
}

/// Prefix sine products below this are treated as a collapsed sphere; the
/// remaining angles of the row are set to π/2.
pub const SINE_PRODUCT_FLOOR: f64 = 1e-300;

/// Inverse of [`sphere_point`] for a unit vector whose last coordinate is
/// positive. Each angle is `atan2(‖x_{m+1..}‖, x_m)`, the stable form of
/// `arccos(x_m / ∏_{q<m} sin θ_q)`.
pub fn sphere_angles(point: &[f64]) -> Vec<f64> {
    let d = point.len() - 1;
    let mut tail = vec![0.0; d + 2];
    for m in (0..=d).rev() {
        tail[m] = point[m].hypot(tail[m + 1]);
    }
    let mut out = Vec::with_capacity(d);
    for m in 0..d {
        if tail[m] < SINE_PRODUCT_FLOOR {
            out.extend(std::iter::repeat_n(FRAC_PI_2, d - m));
            break;
        }
        out.push(tail[m + 1].atan2(point[m]).clamp(f64::MIN_POSITIVE, BELOW_PI));
    }
    out
}

/// Largest double below π; keeps recovered angles inside the open range.
const BELOW_PI: f64 = 3.141_592_653_589_792_7;

/// JSON angle schema: `{"field": ..., "n": N, "rows": [[θ...], ...]}` with
/// rows `j = 2..=N` in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSetJson {
    pub field: Field,
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl AngleSetJson {
    pub fn from_angles<S: Scalar>(a: &AngleSet<S>) -> Self {
        Self {
            field: S::FIELD,
            n: a.dim(),
            rows: a.rows(),
        }
    }

    pub fn to_angles<S: Scalar>(&self) -> Result<AngleSet<S>> {
        if self.field != S::FIELD {
            return Err(Error::FieldMismatch {
                expected: S::FIELD,
                found: self.field,
            });
        }
        AngleSet::from_rows(self.n, &self.rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Quaternion;
    use num_complex::Complex64;

    #[test]
    fn counts_and_layout() {
        assert_eq!(angle_count(1, 4), 6);
        assert_eq!(angle_count(2, 3), 6);
        assert_eq!(angle_count(4, 3), 12);
        let flat: Vec<f64> = (1..=6).map(|i| i as f64 * 0.4).collect();
        let a = AngleSet::<f64>::from_flat(4, flat).unwrap();
        assert_eq!(a.row(2), &[0.4]);
        assert_eq!(a.row(3), &[0.8, 1.2000000000000002]);
        assert_eq!(a.get(4, 3), 2.4000000000000004);
        assert!(a.row(1).is_empty());
        let q = AngleSet::<Quaternion>::neutral(3);
        assert_eq!(q.row(3).len(), 8);
        assert_eq!(q.slots().count(), 12);
    }

    #[test]
    fn rejects_boundary_angles() {
        let err = AngleSet::<f64>::from_flat(2, vec![0.0]).unwrap_err();
        assert_eq!(
            err,
            Error::AngleOutOfRange {
                row: 2,
                slot: 1,
                value: 0.0
            }
        );
        assert!(AngleSet::<f64>::from_flat(2, vec![PI]).is_err());
        assert!(AngleSet::<f64>::from_flat(2, vec![f64::NAN]).is_err());
        assert!(AngleSet::<Complex64>::from_flat(2, vec![1.0]).is_err());
    }

    #[test]
    fn rows_accept_optional_empty_first_row() {
        let a = AngleSet::<f64>::from_rows(3, &[vec![1.0], vec![1.0, 2.0]]).unwrap();
        let b = AngleSet::<f64>::from_rows(3, &[vec![], vec![1.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(a, b);
        assert!(AngleSet::<f64>::from_rows(3, &[vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn sphere_roundtrip() {
        let angles = [0.3, 2.9, 1.1, 0.01, 3.1];
        let p = sphere_point(&angles);
        let norm: f64 = p.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-15);
        for (a, b) in sphere_angles(&p).iter().zip(angles) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn collapsed_sphere_uses_neutral_angles() {
        let back = sphere_angles(&[-1.0, 0.0, 0.0, 1e-320]);
        assert!(back[0] < PI && back[0] > PI - 1e-3);
        assert_eq!(&back[1..], &[FRAC_PI_2, FRAC_PI_2]);
    }

    #[test]
    fn json_roundtrip() {
        let a = AngleSet::<Complex64>::constant(3, 1.0).unwrap();
        let js = AngleSetJson::from_angles(&a);
        let text = serde_json::to_string(&js).unwrap();
        assert!(text.starts_with(r#"{"field":"complex","n":3,"rows":[[1.0,1.0],"#));
        let back: AngleSetJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_angles::<Complex64>().unwrap(), a);
        assert!(back.to_angles::<f64>().is_err());
    }
}

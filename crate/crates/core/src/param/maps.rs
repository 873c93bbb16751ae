//! Maps among hyperspherical angles, Cholesky factors and partial
//! correlations.

use crate::algebra::{partial_corr_from_schur, CholeskyFactor, CorrelationMatrix, Matrix, Scalar};
use crate::error::{Error, Result};

use super::angles::{row_len, sphere_angles, sphere_point, AngleSet};

/// Partial correlations `ρ_{jk|{1..k−1}}` for `1 ≤ k < j ≤ N`, stored
/// row-major over the strict lower triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialCorrelationTable<S> {
    n: usize,
    entries: Vec<S>,
}

fn tri_index(j: usize, k: usize) -> usize {
    (j - 1) * (j - 2) / 2 + (k - 1)
}

impl<S: Scalar> PartialCorrelationTable<S> {
    /// Entries in order `(2,1), (3,1), (3,2), (4,1), ...`; each must have
    /// modulus strictly below 1.
    pub fn new(n: usize, entries: Vec<S>) -> Result<Self> {
        let want = n * n.saturating_sub(1) / 2;
        if n == 0 || entries.len() != want {
            return Err(Error::Dimension(format!(
                "table of dimension {n} needs {want} entries, got {}",
                entries.len()
            )));
        }
        let table = Self { n, entries };
        for (j, k, rho) in table.iter() {
            if !(rho.is_finite() && rho.norm_sqr() < 1.0) {
                return Err(Error::domain(
                    "partial correlation table",
                    format!("|rho_({j},{k})| must be < 1, got {}", rho.abs()),
                ));
            }
        }
        Ok(table)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `ρ_{jk|{1..k−1}}`, 1-based with `k < j`.
    pub fn get(&self, j: usize, k: usize) -> S {
        assert!(k >= 1 && k < j && j <= self.n, "({j}, {k}) is not strictly lower");
        self.entries[tri_index(j, k)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, S)> + '_ {
        (2..=self.n).flat_map(move |j| (1..j).map(move |k| (j, k, self.entries[tri_index(j, k)])))
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Cholesky factor with rows given by the hyperspherical parametrisation
/// over the field: the real coordinates of row `j` (β per off-diagonal
/// entry, then the real diagonal) are the sphere point of that row's angles.
pub fn angles_to_cholesky<S: Scalar>(angles: &AngleSet<S>) -> CholeskyFactor<S> {
    let n = angles.dim();
    let beta = S::BETA;
    let mut l = Matrix::<S>::zeros(n, n);
    l[(0, 0)] = S::one();
    for j in 2..=n {
        let coords = sphere_point(angles.row(j));
        for k in 1..j {
            l[(j - 1, k - 1)] = S::from_components(&coords[beta * (k - 1)..beta * k]);
        }
        l[(j - 1, j - 1)] = S::from_real(coords[beta * (j - 1)]);
    }
    CholeskyFactor::new_unchecked(l)
}

/// Recovers the angles of a factor with unit-norm rows.
///
/// Fails when a squared row norm deviates from 1 by more than 1e-8. When the
/// prefix sine product of a row underflows (below 1e-300) the remaining
/// angles of that row are set to π/2.
pub fn cholesky_to_angles<S: Scalar>(l: &CholeskyFactor<S>) -> Result<AngleSet<S>> {
    let n = l.dim();
    let mut flat = Vec::with_capacity(super::angle_count(S::BETA, n));
    for j in 0..n {
        let coords = l.row_coordinates(j);
        let sq: f64 = coords.iter().map(|x| x * x).sum();
        if (sq - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidFactor(format!(
                "row {} has squared norm {sq}, expected 1",
                j + 1
            )));
        }
        if j > 0 {
            let row = sphere_angles(&coords);
            debug_assert_eq!(row.len(), row_len(S::BETA, j + 1));
            flat.extend(row);
        }
    }
    AngleSet::from_flat(n, flat)
}

/// `ρ_{jk|{1..k−1}}` from the angles of row `j`: the first β coordinates of
/// the sphere point formed by the angles of block `k` alone.
pub fn angles_to_partials<S: Scalar>(angles: &AngleSet<S>) -> PartialCorrelationTable<S> {
    let n = angles.dim();
    let beta = S::BETA;
    let mut entries = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 2..=n {
        let row = angles.row(j);
        for k in 1..j {
            let coords = sphere_point(&row[beta * (k - 1)..beta * k]);
            entries.push(S::from_components(&coords[..beta]));
        }
    }
    PartialCorrelationTable { n, entries }
}

/// Cholesky factor from partial correlations:
/// `l_jk = ρ_{jk|…} ∏_{p<k} √(1 − |ρ_{jp|…}|²)` and `l_jj` the remaining
/// radius `√(1 − Σ_{p<j} |l_jp|²)`.
pub fn partials_to_cholesky<S: Scalar>(t: &PartialCorrelationTable<S>) -> CholeskyFactor<S> {
    let n = t.dim();
    let mut l = Matrix::<S>::zeros(n, n);
    l[(0, 0)] = S::one();
    for j in 2..=n {
        let mut radius = 1.0;
        for k in 1..j {
            let rho = t.get(j, k);
            l[(j - 1, k - 1)] = rho.scale(radius);
            radius *= (1.0 - rho.norm_sqr()).sqrt();
        }
        l[(j - 1, j - 1)] = S::from_real(radius);
    }
    CholeskyFactor::new_unchecked(l)
}

/// `ρ_{jk|{1..k−1}}` for every `k < j`, read from the Schur-complement
/// partial correlation matrices of `r`.
pub fn partials_from_schur<S: Scalar>(r: &CorrelationMatrix<S>) -> Result<PartialCorrelationTable<S>> {
    let n = r.dim();
    let levels = (1..n)
        .map(|k| partial_corr_from_schur(r, k))
        .collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for j in 2..=n {
        for (k, level) in levels.iter().enumerate().take(j - 1) {
            // level k holds variables k+1..=N; row j sits at offset j-1-k
            entries.push(level[(j - 1 - k, 0)]);
        }
    }
    Ok(PartialCorrelationTable { n, entries })
}

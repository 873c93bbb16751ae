//! Level-by-level partial covariances and partial correlations.

use crate::algebra::{normalise_covariance, CorrelationMatrix, Field, Matrix, Scalar, PIVOT_FLOOR};
use crate::error::{Error, Result};

/// Conditional quantities after projecting out variables `1..=p`, for
/// `p = 0..N−1`. Level `p` is an `(N−p)×(N−p)` matrix over variables
/// `p+1..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelTable<S> {
    levels: Vec<Matrix<S>>,
}

/// Partial covariances `σ_{jk|{1..p}}`.
pub type PartialCovarianceTable<S> = LevelTable<S>;

/// Partial correlations `ρ_{jk|{1..p}}`.
pub type PartialCorrelationLevels<S> = LevelTable<S>;

impl<S: Scalar> LevelTable<S> {
    pub fn dim(&self) -> usize {
        self.levels.first().map_or(0, Matrix::dim)
    }

    /// Matrix after conditioning on the first `p` variables.
    pub fn level(&self, p: usize) -> &Matrix<S> {
        &self.levels[p]
    }

    pub fn levels(&self) -> &[Matrix<S>] {
        &self.levels
    }

    /// Entry for variables `j, k` (1-based, both `> p`) given `1..=p`.
    pub fn get(&self, j: usize, k: usize, p: usize) -> S {
        assert!(j > p && k > p && j <= self.dim() && k <= self.dim());
        self.levels[p][(j - 1 - p, k - 1 - p)]
    }
}

/// Partial covariances by the rank-one downdate
/// `σ_{jk|{1..p}} = σ_{jk|{1..p−1}} − σ_{jp|…} σ_{pk|…} / σ_{pp|…}`,
/// seeded with the plain covariances.
pub fn partial_cov_recursion<S: Scalar>(s: &Matrix<S>) -> Result<PartialCovarianceTable<S>> {
    if !s.is_square() || s.rows() == 0 {
        return Err(Error::Dimension(format!(
            "{}x{} is not a non-empty square",
            s.rows(),
            s.cols()
        )));
    }
    let floor = PIVOT_FLOOR * s.max_diag();
    let mut levels = vec![s.clone()];
    for p in 1..s.dim() {
        let prev = &levels[p - 1];
        let pivot = prev[(0, 0)].re();
        if !(pivot > floor) {
            return Err(Error::Degenerate {
                level: p,
                reason: format!("partial variance of variable {p} is {pivot:e}"),
            });
        }
        let inv = 1.0 / pivot;
        let q = prev.dim() - 1;
        let mut next = Matrix::from_fn(q, q, |j, k| {
            prev[(j + 1, k + 1)] - (prev[(j + 1, 0)] * prev[(0, k + 1)]).scale(inv)
        });
        next.realify_diagonal();
        levels.push(next);
    }
    Ok(LevelTable { levels })
}

/// Partial correlations at every level.
///
/// Real matrices use the correlation-level recursion
/// `ρ' = (ρ_jk − ρ_jp ρ_pk) / (√(1−ρ_jp²) √(1−ρ_pk²))`; complex and
/// quaternion matrices normalise the partial covariance levels instead.
pub fn partial_corr_recursion<S: Scalar>(r: &CorrelationMatrix<S>) -> Result<PartialCorrelationLevels<S>> {
    match S::FIELD {
        Field::Real => correlation_recursion(r),
        Field::Complex | Field::Quaternion => {
            let cov = partial_cov_recursion(r.as_matrix())?;
            let levels = cov
                .levels
                .iter()
                .enumerate()
                .map(|(p, m)| normalise_covariance(m, PIVOT_FLOOR, p))
                .collect::<Result<Vec<_>>>()?;
            Ok(LevelTable { levels })
        }
    }
}

const UNIT_CORRELATION_TOL: f64 = 1e-12;

fn correlation_recursion<S: Scalar>(r: &CorrelationMatrix<S>) -> Result<PartialCorrelationLevels<S>> {
    let n = r.dim();
    let mut levels = vec![r.as_matrix().clone()];
    for p in 1..n {
        let prev = &levels[p - 1];
        let q = prev.dim() - 1;
        let mut co = Vec::with_capacity(q);
        for j in 0..q {
            let c = 1.0 - prev[(j + 1, 0)].norm_sqr();
            if !(c > UNIT_CORRELATION_TOL) {
                return Err(Error::Degenerate {
                    level: p,
                    reason: format!("|rho_({},{p})| reached 1", j + p + 1),
                });
            }
            co.push(c.sqrt());
        }
        let mut next = Matrix::from_fn(q, q, |j, k| {
            (prev[(j + 1, k + 1)] - prev[(j + 1, 0)] * prev[(0, k + 1)]).scale(1.0 / (co[j] * co[k]))
        });
        for i in 0..q {
            next[(i, i)] = S::one();
        }
        levels.push(next);
    }
    Ok(LevelTable { levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{partial_corr_from_schur, schur_complement, Quaternion};
    use crate::sampling::{normalised_random_correlation, random_positive_definite};
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn equicorrelated(n: usize, rho: f64) -> CorrelationMatrix<f64> {
        CorrelationMatrix::new(Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { rho })).unwrap()
    }

    #[test]
    fn diagonal_input_is_unchanged() {
        let s = Matrix::from_fn(4, 4, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        let t = partial_cov_recursion(&s).unwrap();
        for p in 0..4 {
            for j in p + 1..=4 {
                assert_eq!(t.get(j, j, p), j as f64);
            }
        }
    }

    #[test]
    fn one_step_example() {
        let t = partial_cov_recursion(equicorrelated(3, 0.5).as_matrix()).unwrap();
        assert_relative_eq!(t.get(3, 3, 1), 0.75, max_relative = 1e-15);
        assert_relative_eq!(t.get(3, 2, 1), 0.25, max_relative = 1e-15);

        let c = partial_corr_recursion(&equicorrelated(3, 0.5)).unwrap();
        assert_relative_eq!(c.get(3, 2, 1), 1.0 / 3.0, max_relative = 1e-15);
        let id = partial_corr_recursion(&CorrelationMatrix::<f64>::identity(5)).unwrap();
        assert!(id
            .levels()
            .iter()
            .all(|m| m.max_abs_diff(&Matrix::identity(m.dim())) == 0.0));
    }

    #[test]
    fn degenerate_inputs() {
        let s = Matrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert!(matches!(
            partial_cov_recursion(&s),
            Err(Error::Degenerate { level: 2, .. })
        ));
    }

    fn levels_match_schur<S: Scalar>(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for n in 1..=8 {
            let s = random_positive_definite::<S, _>(n, &mut rng);
            let t = partial_cov_recursion(&s).unwrap();
            for p in 0..n {
                let sc = schur_complement(&s, p + 1).unwrap();
                assert!(t.level(p).max_abs_diff(&sc) < 1e-11 * s.max_diag(), "cov n={n} p={p}");
            }
            let r = normalised_random_correlation::<S, _>(n, &mut rng);
            let c = partial_corr_recursion(&r).unwrap();
            for p in 0..n {
                let direct = partial_corr_from_schur(&r, p + 1).unwrap();
                assert!(c.level(p).max_abs_diff(&direct) < 1e-11, "corr n={n} p={p}");
            }
        }
    }

    #[test]
    fn recursions_match_schur_complements() {
        levels_match_schur::<f64>(31);
        levels_match_schur::<Complex64>(32);
        levels_match_schur::<Quaternion>(33);
    }
}

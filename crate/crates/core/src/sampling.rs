//! Exact samplers for the `(det R)^a` law: independent sin-power angles,
//! the Gaussian Gram construction, and uniform-entry candidates for the
//! positive-definiteness rejection experiment.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algebra::{cholesky_decompose, CholeskyFactor, CorrelationMatrix, Field, Matrix, Scalar};
use crate::error::{Error, Result};
use crate::measures::{angle_exponent, DensityParams};
use crate::param::{angle_count, angles_to_cholesky, AngleSet};

/// The generator behind every [`RandomStream`].
pub type StreamRng = ChaCha8Rng;

/// A reproducible random source: `(seed, stream)` selects one ChaCha8
/// keystream. Distinct streams under the same seed never overlap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomStream {
    pub seed: u64,
    pub stream: u64,
}

impl RandomStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Draws θ on (0, π) with density ∝ sin^k θ.
///
/// With `u ~ Beta((k+1)/2, (k+1)/2)`, `θ = arccos(1 − 2u)`. The beta variate
/// comes from two gammas `X, Y`, and `arccos((Y−X)/(X+Y)) = 2 atan2(√X, √Y)`,
/// which keeps full precision near both endpoints.
pub fn sample_sin_power<R: Rng + ?Sized>(k: f64, rng: &mut R) -> Result<f64> {
    if !(k.is_finite() && k > -1.0) {
        return Err(Error::domain(
            "sample_sin_power",
            format!("exponent must be > -1, got {k}"),
        ));
    }
    let gamma = Gamma::new(0.5 * (k + 1.0), 1.0).map_err(|e| Error::domain("sample_sin_power", e.to_string()))?;
    loop {
        let x: f64 = gamma.sample(rng);
        let y: f64 = gamma.sample(rng);
        let theta = 2.0 * x.sqrt().atan2(y.sqrt());
        if theta > 0.0 && theta < PI {
            return Ok(theta);
        }
    }
}

/// Independent sin-power angles with exponents `angle_exponent(j, p, params)`.
pub fn sample_angles<S: Scalar, R: Rng + ?Sized>(params: &DensityParams, rng: &mut R) -> Result<AngleSet<S>> {
    if params.field != S::FIELD {
        return Err(Error::FieldMismatch {
            expected: params.field,
            found: S::FIELD,
        });
    }
    let n = params.n;
    let mut angles = Vec::with_capacity(angle_count(S::BETA, n));
    for j in 2..=n {
        for p in 1..=S::BETA * (j - 1) {
            angles.push(sample_sin_power(angle_exponent(j, p, params)?, rng)?);
        }
    }
    AngleSet::from_flat(n, angles)
}

pub fn sample_correlation<S: Scalar, R: Rng + ?Sized>(
    params: &DensityParams,
    rng: &mut R,
) -> Result<CorrelationMatrix<S>> {
    let angles = sample_angles::<S, R>(params, rng)?;
    CorrelationMatrix::from_factor(&angles_to_cholesky(&angles))
}

/// `n × N` Gaussian data matrix whose normalised Gram matrix is the sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianConstructionParams {
    pub n_samples: usize,
    pub dim: usize,
    pub field: Field,
}

impl GaussianConstructionParams {
    pub fn new(n_samples: usize, dim: usize, field: Field) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("gaussian_construction", "dimension must be at least 1"));
        }
        if n_samples < dim {
            return Err(Error::domain(
                "gaussian_construction",
                format!("need at least N = {dim} samples, got {n_samples}"),
            ));
        }
        Ok(Self { n_samples, dim, field })
    }

    /// `a = (β/2)(n − N + 1 − 2/β)`.
    pub fn implied_a(&self) -> f64 {
        let beta = self.field.beta() as f64;
        0.5 * beta * (self.n_samples as f64 - self.dim as f64 + 1.0 - 2.0 / beta)
    }

    pub fn density_params(&self) -> Result<DensityParams> {
        DensityParams::new(self.implied_a(), self.field, self.dim)
    }
}

/// A scalar with independent standard normal components.
pub fn gaussian_scalar<S: Scalar, R: Rng + ?Sized>(rng: &mut R) -> S {
    let mut c = [0.0; 4];
    for x in c.iter_mut().take(S::BETA) {
        *x = StandardNormal.sample(rng);
    }
    S::from_components(&c[..S::BETA])
}

/// Unit-diagonal rescaling of the Gram matrix `Y†Y` of an `n × N` matrix of
/// field-Gaussian entries.
pub fn gaussian_construction<S: Scalar, R: Rng + ?Sized>(
    params: &GaussianConstructionParams,
    rng: &mut R,
) -> Result<CorrelationMatrix<S>> {
    if params.field != S::FIELD {
        return Err(Error::FieldMismatch {
            expected: params.field,
            found: S::FIELD,
        });
    }
    let y = Matrix::from_fn(params.n_samples, params.dim, |_, _| gaussian_scalar::<S, R>(rng));
    gram_to_correlation(&y.gram_columns())
}

fn gram_to_correlation<S: Scalar>(sigma: &Matrix<S>) -> Result<CorrelationMatrix<S>> {
    let d: Vec<f64> = (0..sigma.dim()).map(|i| 1.0 / sigma[(i, i)].re().sqrt()).collect();
    let mut r = Matrix::from_fn(sigma.dim(), sigma.dim(), |j, k| sigma[(j, k)].scale(d[j] * d[k]));
    r.realify_diagonal();
    CorrelationMatrix::new(r)
}

/// Unit-diagonal Hermitian matrix whose strictly-lower real components are
/// independent uniform(−1, 1). Not necessarily positive definite.
pub fn uniform_candidate<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<S> {
    let mut m = Matrix::identity(n);
    let mut c = [0.0; 4];
    for j in 0..n {
        for k in 0..j {
            for x in c.iter_mut().take(S::BETA) {
                *x = rng.random_range(-1.0..1.0);
            }
            let v = S::from_components(&c[..S::BETA]);
            m[(j, k)] = v;
            m[(k, j)] = v.conj();
        }
    }
    m
}

/// Whether a uniform candidate is positive definite under the floored
/// Cholesky test. Pivots at the floor count as failures.
pub fn uniform_candidate_is_pd<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> bool {
    cholesky_decompose(&uniform_candidate::<S, R>(n, rng)).is_ok()
}

/// Angles uniform on (0, π), not from any density of interest; used to probe
/// maps at generic interior points.
pub fn uniform_angles<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> AngleSet<S> {
    let angles = (0..angle_count(S::BETA, n))
        .map(|_| loop {
            let t = rng.random::<f64>() * PI;
            if t > 0.0 && t < PI {
                break t;
            }
        })
        .collect();
    AngleSet::from_flat(n.max(1), angles).expect("angles are interior")
}

/// Angles of a matrix uniform on the elliptope, i.e. [`sample_angles`] at
/// `a = 0`. Unlike [`uniform_angles`] these keep `R` well conditioned at
/// moderate `N`, so they suit checks that decompose the reconstructed matrix.
pub fn elliptope_angles<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> AngleSet<S> {
    let params = DensityParams::new(0.0, S::FIELD, n.max(1)).expect("a = 0 is valid");
    sample_angles::<S, R>(&params, rng).expect("field matches")
}

/// Lower-triangular factor with Gaussian off-diagonal entries and diagonal
/// `1 + |g|`, so conditioning stays moderate.
pub fn random_factor<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CholeskyFactor<S> {
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        for k in 0..j {
            l[(j, k)] = gaussian_scalar::<S, R>(rng);
        }
        let g: f64 = StandardNormal.sample(rng);
        l[(j, j)] = S::from_real(1.0 + g.abs());
    }
    CholeskyFactor::new(l).expect("positive diagonal")
}

/// `L L†` for a [`random_factor`].
pub fn random_positive_definite<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<S> {
    crate::algebra::gram(&random_factor::<S, R>(n, rng))
}

/// Unit-diagonal rescaling of a [`random_positive_definite`] matrix.
pub fn normalised_random_correlation<S: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CorrelationMatrix<S> {
    gram_to_correlation(&random_positive_definite::<S, R>(n, rng)).expect("rescaled Gram matrix is a correlation")
}

/// A fresh seed from system entropy.
pub fn entropy_seed() -> u64 {
    rand::rng().next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{is_valid_correlation, Quaternion};
    use crate::measures::{det_moment, pd_probability};
    use num_complex::Complex64;

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    fn within_3se(xs: &[f64], want: f64) -> bool {
        let (m, se) = mean_and_se(xs);
        (m - want).abs() <= 3.0 * se
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| RandomStream::new(9, 3).rng().next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut s0 = RandomStream::new(9, 0).rng();
        let mut s1 = RandomStream::new(9, 1).rng();
        assert_ne!(s0.next_u64(), s1.next_u64());
    }

    #[test]
    fn sin_power_rejects_bad_exponent() {
        let mut rng = RandomStream::new(0, 0).rng();
        assert!(sample_sin_power(-1.0, &mut rng).is_err());
        assert!(sample_sin_power(f64::NAN, &mut rng).is_err());
        assert!(sample_sin_power(-0.99, &mut rng).is_ok());
    }

    #[test]
    fn sin_power_moments() {
        let mut rng = RandomStream::new(1, 0).rng();
        let draws = |k: f64, rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..100_000).map(|_| sample_sin_power(k, rng).unwrap()).collect()
        };
        let t0 = draws(0.0, &mut rng);
        assert!(within_3se(&t0.iter().map(|t| t.cos()).collect::<Vec<_>>(), 0.0));
        let t1 = draws(1.0, &mut rng);
        assert!(within_3se(
            &t1.iter().map(|t| t.cos().powi(2)).collect::<Vec<_>>(),
            1.0 / 3.0
        ));
        let t2 = draws(2.0, &mut rng);
        assert!(within_3se(
            &t2.iter().map(|t| t.cos().powi(2)).collect::<Vec<_>>(),
            0.25
        ));
        assert!(t0.iter().chain(&t1).chain(&t2).all(|&t| t > 0.0 && t < PI));
    }

    #[test]
    fn uniform_real_n2_mean_and_variance() {
        let p = DensityParams::new(0.0, Field::Real, 2).unwrap();
        let mut rng = RandomStream::new(2, 0).rng();
        let rho: Vec<f64> = (0..100_000)
            .map(|_| sample_correlation::<f64, _>(&p, &mut rng).unwrap().as_matrix()[(1, 0)])
            .collect();
        assert!(within_3se(&rho, 0.0));
        assert!(within_3se(&rho.iter().map(|r| r * r).collect::<Vec<_>>(), 1.0 / 3.0));
    }

    #[test]
    fn complex_n2_modulus_squared_uniform() {
        let p = DensityParams::new(0.0, Field::Complex, 2).unwrap();
        let mut rng = RandomStream::new(3, 0).rng();
        let m: Vec<f64> = (0..100_000)
            .map(|_| sample_correlation::<Complex64, _>(&p, &mut rng).unwrap().as_matrix()[(1, 0)].norm_sqr())
            .collect();
        assert!(within_3se(&m, 0.5));
        assert!(within_3se(&m.iter().map(|x| x * x).collect::<Vec<_>>(), 1.0 / 3.0));
    }

    fn det_mean_matches<S: Scalar>(a: f64, n: usize, seed: u64) {
        let p = DensityParams::new(a, S::FIELD, n).unwrap();
        let mut rng = RandomStream::new(seed, 0).rng();
        let dets: Vec<f64> = (0..20_000)
            .map(|_| {
                sample_correlation::<S, _>(&p, &mut rng)
                    .unwrap()
                    .log_det()
                    .unwrap()
                    .exp()
            })
            .collect();
        let want = det_moment(1.0, &p).unwrap();
        assert!(within_3se(&dets, want), "{} a={a} n={n}", S::FIELD);
    }

    #[test]
    fn det_means_match_moments() {
        det_mean_matches::<f64>(0.0, 3, 4);
        det_mean_matches::<Complex64>(1.0, 3, 5);
        det_mean_matches::<Quaternion>(0.0, 2, 6);
    }

    #[test]
    fn sampler_outputs_are_correlations() {
        let mut rng = RandomStream::new(7, 0).rng();
        for n in 1..=8 {
            for field in Field::ALL {
                let p = DensityParams::new(0.5, field, n).unwrap();
                for _ in 0..50 {
                    let ok = match field {
                        Field::Real => {
                            is_valid_correlation(sample_correlation::<f64, _>(&p, &mut rng).unwrap().as_matrix())
                        }
                        Field::Complex => {
                            is_valid_correlation(sample_correlation::<Complex64, _>(&p, &mut rng).unwrap().as_matrix())
                        }
                        Field::Quaternion => {
                            is_valid_correlation(sample_correlation::<Quaternion, _>(&p, &mut rng).unwrap().as_matrix())
                        }
                    };
                    assert!(ok);
                }
            }
        }
    }

    #[test]
    fn field_mismatch_rejected() {
        let p = DensityParams::new(0.0, Field::Complex, 3).unwrap();
        let mut rng = RandomStream::new(0, 0).rng();
        assert!(sample_angles::<f64, _>(&p, &mut rng).is_err());
        let g = GaussianConstructionParams::new(4, 3, Field::Real).unwrap();
        assert!(gaussian_construction::<Quaternion, _>(&g, &mut rng).is_err());
    }

    #[test]
    fn implied_exponents() {
        let a = |n, d, f| GaussianConstructionParams::new(n, d, f).unwrap().implied_a();
        assert_eq!(a(4, 3, Field::Real), 0.0);
        assert_eq!(a(3, 3, Field::Real), -0.5);
        assert_eq!(a(3, 3, Field::Complex), 0.0);
        assert_eq!(a(3, 3, Field::Quaternion), 1.0);
        assert_eq!(a(7, 3, Field::Real), 1.5);
        assert!(GaussianConstructionParams::new(2, 3, Field::Real).is_err());
    }

    #[test]
    fn gaussian_construction_matches_moment() {
        let g = GaussianConstructionParams::new(4, 3, Field::Real).unwrap();
        let want = det_moment(1.0, &g.density_params().unwrap()).unwrap();
        let mut rng = RandomStream::new(8, 0).rng();
        let dets: Vec<f64> = (0..20_000)
            .map(|_| {
                gaussian_construction::<f64, _>(&g, &mut rng)
                    .unwrap()
                    .log_det()
                    .unwrap()
                    .exp()
            })
            .collect();
        assert!(within_3se(&dets, want));
    }

    #[test]
    fn gaussian_scale_cancels() {
        // the law of R does not depend on the scale of the entries
        let g = GaussianConstructionParams::new(5, 3, Field::Complex).unwrap();
        let mut r1 = RandomStream::new(10, 0).rng();
        let mut r2 = RandomStream::new(10, 0).rng();
        for _ in 0..100 {
            let a = gaussian_construction::<Complex64, _>(&g, &mut r1).unwrap();
            let y = Matrix::from_fn(5, 3, |_, _| gaussian_scalar::<Complex64, _>(&mut r2).scale(7.5));
            let b = gram_to_correlation(&y.gram_columns()).unwrap();
            assert!(a.as_matrix().max_abs_diff(b.as_matrix()) < 1e-12);
        }
    }

    #[test]
    fn uniform_candidates() {
        let mut rng = RandomStream::new(11, 0).rng();
        for _ in 0..1000 {
            let m = uniform_candidate::<f64, _>(2, &mut rng);
            assert!(is_valid_correlation(&m));
            let q = uniform_candidate::<Quaternion, _>(3, &mut rng);
            assert!(q.hermitian_violation(0.0).is_none());
            assert!((0..3).all(|i| q[(i, i)] == Quaternion::from_real(1.0)));
        }
        let hits: Vec<f64> = (0..100_000)
            .map(|_| uniform_candidate_is_pd::<f64, _>(3, &mut rng) as u8 as f64)
            .collect();
        assert!(within_3se(&hits, pd_probability(3, Field::Real).unwrap()));
    }
}

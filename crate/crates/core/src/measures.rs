//! Closed-form measure quantities for the `(det R)^a` family: Jacobians,
//! determinant factorisation, normalisation constants, volumes, marginals
//! and determinant moments.
//!
//! Everything is returned in log space unless the name says otherwise.
//! Angle slots are addressed as `(j, p)` with row `2 ≤ j ≤ N` and slot
//! `1 ≤ p ≤ β(j−1)`, in the storage order of [`AngleSet`].

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::algebra::{Field, Scalar};
use crate::error::{Error, Result};
use crate::param::{row_len, AngleSet, PartialCorrelationTable};
use crate::special::{digamma, ln_beta, ln_sin_power_integral, log_gamma};

/// Parameters of the density `(det R)^a / C` on `N×N` correlation matrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityParams {
    pub a: f64,
    pub field: Field,
    pub n: usize,
}

impl DensityParams {
    pub fn new(a: f64, field: Field, n: usize) -> Result<Self> {
        if !(a.is_finite() && a > -1.0) {
            return Err(Error::domain("density", format!("exponent a must be > -1, got {a}")));
        }
        if n == 0 {
            return Err(Error::domain("density", "dimension must be at least 1"));
        }
        Ok(Self { a, field, n })
    }

    pub fn beta(&self) -> usize {
        self.field.beta()
    }

    fn ensure_field<S: Scalar>(&self) -> Result<()> {
        if self.field == S::FIELD {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                expected: self.field,
                found: S::FIELD,
            })
        }
    }

    /// Exponent of `sin θ_{jp}` in the density-weighted volume form:
    /// `2a + βN − p − (β − 1)`. Does not depend on the row.
    fn slot_exponent(&self, p: usize) -> f64 {
        let beta = self.beta() as f64;
        2.0 * self.a + beta * self.n as f64 - p as f64 - (beta - 1.0)
    }

    /// Number of rows `j ≤ N` that have a slot `p`.
    fn slot_multiplicity(&self, p: usize) -> usize {
        self.n - p.div_ceil(self.beta())
    }
}

/// Exponent of `sin θ_{jp}` in `(det R)^a` times the Jacobian.
pub fn angle_exponent(j: usize, p: usize, params: &DensityParams) -> Result<f64> {
    if !(2..=params.n).contains(&j) || !(1..=row_len(params.beta(), j)).contains(&p) {
        return Err(Error::Usage(format!(
            "angle slot ({j}, {p}) does not exist for {} dimension {}",
            params.field, params.n
        )));
    }
    Ok(params.slot_exponent(p))
}

/// Jacobian exponent of slot `p` in dimension `n` (the `a = 0` exponent).
fn jacobian_exponent(beta: usize, n: usize, p: usize) -> f64 {
    (beta * n - p - (beta - 1)) as f64
}

/// ln |J| of the map from angles to the real coordinates of the strictly
/// lower triangle of `R`: `Σ (βN − p − β + 1) ln sin θ_{jp}`.
pub fn log_jacobian_hyperspherical<S: Scalar>(angles: &AngleSet<S>) -> f64 {
    let n = angles.dim();
    angles
        .slots()
        .map(|(_, p, t)| jacobian_exponent(S::BETA, n, p) * t.sin().ln())
        .sum()
}

pub fn jacobian_hyperspherical<S: Scalar>(angles: &AngleSet<S>) -> f64 {
    log_jacobian_hyperspherical(angles).exp()
}

/// ln |J| of the map from correlations to partial correlations (real):
/// `Σ_{j,k} (N − k − 1)/2 · ln(1 − ρ²_{jk|…})`.
pub fn log_jacobian_partials(t: &PartialCorrelationTable<f64>) -> f64 {
    let n = t.dim() as f64;
    t.iter()
        .map(|(_, k, rho)| 0.5 * (n - k as f64 - 1.0) * (1.0 - rho * rho).ln())
        .sum()
}

pub fn jacobian_partials(t: &PartialCorrelationTable<f64>) -> f64 {
    log_jacobian_partials(t).exp()
}

/// ln det R = 2 Σ ln sin θ over all angles.
pub fn log_det_from_angles<S: Scalar>(angles: &AngleSet<S>) -> f64 {
    2.0 * angles.as_slice().iter().map(|t| t.sin().ln()).sum::<f64>()
}

/// ln C, accumulated slot by slot as `Σ_p m_p ln ∫₀^π sin^{e_p}` with `m_p`
/// the number of rows containing slot `p`.
pub fn log_normalisation(params: &DensityParams) -> Result<f64> {
    let slots = params.beta() * params.n.saturating_sub(1);
    (1..=slots).try_fold(0.0, |acc, p| {
        let m = params.slot_multiplicity(p) as f64;
        Ok(acc + m * ln_sin_power_integral(params.slot_exponent(p))?)
    })
}

/// Three equivalent product forms of the normalisation constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalisationForm {
    /// `∏_k ∏_{s<β} B(a + (βk+1−s)/2, 1/2)^k`
    BetaProduct,
    /// `∏_k (π^{β/2} Γ(a + β(k−1)/2 + 1) / Γ(a + βk/2 + 1))^k`
    GammaRatio,
    /// `π^{βN(N−1)/4} ∏_k Γ(a + β(k−1)/2 + 1) / Γ(a + β(N−1)/2 + 1)^{N−1}`
    Telescoped,
}

impl NormalisationForm {
    pub const ALL: [NormalisationForm; 3] = [
        NormalisationForm::BetaProduct,
        NormalisationForm::GammaRatio,
        NormalisationForm::Telescoped,
    ];
}

pub fn log_normalisation_form(params: &DensityParams, form: NormalisationForm) -> Result<f64> {
    let (a, beta, n) = (params.a, params.beta() as f64, params.n);
    let mut acc = 0.0;
    match form {
        NormalisationForm::BetaProduct => {
            for k in 1..n {
                let kf = k as f64;
                for s in 0..params.beta() {
                    acc += kf * ln_beta(a + (beta * kf + 1.0 - s as f64) / 2.0, 0.5)?;
                }
            }
        }
        NormalisationForm::GammaRatio => {
            for k in 1..n {
                let kf = k as f64;
                let term = 0.5 * beta * PI.ln() + log_gamma(a + beta * (kf - 1.0) / 2.0 + 1.0)?
                    - log_gamma(a + beta * kf / 2.0 + 1.0)?;
                acc += kf * term;
            }
        }
        NormalisationForm::Telescoped => {
            let nf = n as f64;
            acc += beta * (nf - 1.0) * nf / 4.0 * PI.ln();
            acc -= (nf - 1.0) * log_gamma(a + beta / 2.0 * (nf - 1.0) + 1.0)?;
            for k in 1..n {
                acc += log_gamma(a + beta / 2.0 * (k as f64 - 1.0) + 1.0)?;
            }
        }
    }
    Ok(acc)
}

/// ln vol of the set of `N×N` correlation matrices over `field`, measured in
/// the real coordinates of the strictly lower triangle.
pub fn log_volume(n: usize, field: Field) -> Result<f64> {
    let params = DensityParams::new(0.0, field, n)?;
    if field == Field::Real {
        let v = log_volume_real_beta_product(n)?;
        debug_assert!((v - log_volume_real_binomial(n)?).abs() <= 1e-12 * v.abs().max(1.0));
        Ok(v)
    } else {
        log_normalisation(&params)
    }
}

/// `∏_{j=1}^{N−1} B((j+1)/2, 1/2)^j`, in log space.
pub fn log_volume_real_beta_product(n: usize) -> Result<f64> {
    (1..n).try_fold(0.0, |acc, j| Ok(acc + j as f64 * ln_beta((j as f64 + 1.0) / 2.0, 0.5)?))
}

/// `∏_{j=2}^{N} 2^{(j−1)²} B(j/2, j/2)^{j−1}`, in log space.
pub fn log_volume_real_binomial(n: usize) -> Result<f64> {
    (2..=n).try_fold(0.0, |acc, j| {
        let jf = j as f64;
        Ok(acc + (jf - 1.0).powi(2) * LN_2 + (jf - 1.0) * ln_beta(jf / 2.0, jf / 2.0)?)
    })
}

/// Probability that a Hermitian unit-diagonal matrix whose strictly-lower
/// real components are independent uniform(−1, 1) is positive definite:
/// the volume divided by that of the cube `(−1,1)^{βN(N−1)/2}`.
pub fn pd_probability(n: usize, field: Field) -> Result<f64> {
    let dims = crate::param::angle_count(field.beta(), n) as f64;
    Ok((log_volume(n, field)? - dims * LN_2).exp())
}

/// ln of the `(det R)^a` density in angle coordinates:
/// `Σ e_p ln sin θ_{jp} − ln C`.
pub fn log_density<S: Scalar>(angles: &AngleSet<S>, params: &DensityParams) -> Result<f64> {
    params.ensure_field::<S>()?;
    if angles.dim() != params.n {
        return Err(Error::Dimension(format!(
            "angle set has dimension {}, parameters say {}",
            angles.dim(),
            params.n
        )));
    }
    let kernel: f64 = angles
        .slots()
        .map(|(_, p, t)| params.slot_exponent(p) * t.sin().ln())
        .sum();
    Ok(kernel - log_normalisation(params)?)
}

/// ln of the `(det R)^a` density with respect to the lower-triangle
/// coordinates of `R`: `a ln det R − ln C`.
pub fn log_density_matrix(log_det: f64, params: &DensityParams) -> Result<f64> {
    Ok(params.a * log_det - log_normalisation(params)?)
}

/// Exponent `(2a + β(N−1) − 1)/2` and beta argument `(2a + β(N−1) + 1)/2`
/// of the marginal law of the real part of an off-diagonal entry.
fn marginal_shape(params: &DensityParams) -> (f64, f64) {
    let e = 2.0 * params.a + (params.beta() * (params.n - 1)) as f64;
    ((e - 1.0) / 2.0, (e + 1.0) / 2.0)
}

/// ln density of `Re ρ_jk` for a single off-diagonal entry:
/// `(1−ρ²)^{(2a+β(N−1)−1)/2} / B((2a+β(N−1)+1)/2, 1/2)`.
pub fn log_marginal_pdf(rho: f64, params: &DensityParams) -> Result<f64> {
    if params.n < 2 {
        return Err(Error::domain("marginal_pdf", "needs dimension at least 2"));
    }
    if !(rho.abs() < 1.0) {
        return Err(Error::domain("marginal_pdf", format!("|rho| must be < 1, got {rho}")));
    }
    let (exponent, b) = marginal_shape(params);
    Ok(exponent * (1.0 - rho * rho).ln() - ln_beta(b, 0.5)?)
}

pub fn marginal_pdf(rho: f64, params: &DensityParams) -> Result<f64> {
    log_marginal_pdf(rho, params).map(f64::exp)
}

/// CDF of the marginal law, `P(Re ρ ≤ x)`, by the incomplete beta integral
/// `I_{(1+x)/2}(b, b)` with `b = (2a+β(N−1)+1)/2`.
pub fn marginal_cdf(x: f64, params: &DensityParams) -> Result<f64> {
    let (_, b) = marginal_shape(params);
    if x <= -1.0 {
        return Ok(0.0);
    }
    if x >= 1.0 {
        return Ok(1.0);
    }
    statrs::function::beta::checked_beta_reg(b, b, 0.5 * (1.0 + x))
        .map_err(|e| Error::domain("marginal_cdf", e.to_string()))
}

/// ln E[(det R)^s] = Σ_k Σ_{l<β} k [ln B(a+s+(βk+1−l)/2, ½) − ln B(a+(βk+1−l)/2, ½)].
pub fn log_det_moment(s: f64, params: &DensityParams) -> Result<f64> {
    if !(params.a + s > -1.0) {
        return Err(Error::domain(
            "det_moment",
            format!("a + s must be > -1, got {}", params.a + s),
        ));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let beta = params.beta() as f64;
    let mut acc = 0.0;
    for k in 1..params.n {
        let kf = k as f64;
        for l in 0..params.beta() {
            let x = params.a + (beta * kf + 1.0 - l as f64) / 2.0;
            acc += kf * (ln_beta(x + s, 0.5)? - ln_beta(x, 0.5)?);
        }
    }
    Ok(acc)
}

pub fn det_moment(s: f64, params: &DensityParams) -> Result<f64> {
    log_det_moment(s, params).map(f64::exp)
}

/// E[ln det R] = Σ_k Σ_{l<β} k [Ψ(a+(βk+1−l)/2) − Ψ(a+(βk+2−l)/2)],
/// the s-derivative of [`log_det_moment`] at zero.
pub fn expected_log_det(params: &DensityParams) -> Result<f64> {
    let beta = params.beta() as f64;
    let mut acc = 0.0;
    for k in 1..params.n {
        let kf = k as f64;
        for l in 0..params.beta() {
            let x = params.a + (beta * kf + 1.0 - l as f64) / 2.0;
            acc += kf * (digamma(x)? - digamma(x + 0.5)?);
        }
    }
    Ok(acc)
}

/// Second cumulant of ln det R: Σ k [Ψ'(x) − Ψ'(x + ½)], with the trigamma
/// taken by central differences of [`digamma`].
pub fn variance_log_det(params: &DensityParams) -> Result<f64> {
    let beta = params.beta() as f64;
    let trigamma = |x: f64| -> Result<f64> {
        let h = 1e-5 * x.max(1.0);
        Ok((digamma(x + h)? - digamma(x - h)?) / (2.0 * h))
    };
    let mut acc = 0.0;
    for k in 1..params.n {
        let kf = k as f64;
        for l in 0..params.beta() {
            let x = params.a + (beta * kf + 1.0 - l as f64) / 2.0;
            acc += kf * (trigamma(x)? - trigamma(x + 0.5)?);
        }
    }
    Ok(acc)
}

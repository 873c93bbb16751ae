//! Scalar special functions: log-gamma, digamma and the beta function.
//!
//! `log_gamma` and `digamma` shift the argument upward with the functional
//! recurrences until it exceeds [`ASYMPTOTIC_THRESHOLD`] and then sum the
//! Stirling / de Moivre asymptotic series. The series coefficients are
//! `B_{2k} / (2k (2k - 1))` (log-gamma) and `B_{2k} / (2k)` (digamma), with
//! `B_{2k}` the Bernoulli numbers (Abramowitz & Stegun 6.1.40 and 6.3.18).
//! At the threshold the first omitted term is below 1e-17.

use crate::error::{Error, Result};

const ASYMPTOTIC_THRESHOLD: f64 = 10.0;

/// ln(2π) / 2
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// B_{2k} / (2k (2k-1)) for k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// B_{2k} / (2k) for k = 1..7.
const DE_MOIVRE: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

fn check_positive(func: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(func, format!("argument must be finite and > 0, got {x}")))
    }
}

/// Evaluates `sum_k coeffs[k] * t^k` for `t = 1/x^2` by Horner's rule.
fn horner_inverse_square(coeffs: &[f64], x: f64) -> f64 {
    let t = 1.0 / (x * x);
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma", x)?;
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < ASYMPTOTIC_THRESHOLD {
        prod *= shifted;
        shifted += 1.0;
    }
    let series = horner_inverse_square(&STIRLING, shifted) / shifted;
    let stirling = (shifted - 0.5) * shifted.ln() - shifted + HALF_LN_2PI + series;
    Ok(stirling - prod.ln())
}

/// The digamma function Ψ(x) = d/dx ln Γ(x) for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    let mut shifted = x;
    let mut acc = 0.0;
    while shifted < ASYMPTOTIC_THRESHOLD {
        acc -= 1.0 / shifted;
        shifted += 1.0;
    }
    let series = horner_inverse_square(&DE_MOIVRE, shifted) / (shifted * shifted);
    Ok(acc + shifted.ln() - 0.5 / shifted - series)
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a + b).
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    check_positive("beta", a)?;
    check_positive("beta", b)?;
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}

/// The beta function, evaluated in log space and exponentiated.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    ln_beta(a, b).map(f64::exp)
}

/// ln ∫₀^π sin^k θ dθ = ln B((k+1)/2, 1/2), for `k > -1`.
pub fn ln_sin_power_integral(k: f64) -> Result<f64> {
    if !(k.is_finite() && k > -1.0) {
        return Err(Error::domain(
            "sin_power_integral",
            format!("exponent must be > -1, got {k}"),
        ));
    }
    ln_beta(0.5 * (k + 1.0), 0.5)
}

/// ∫₀^π sin^k θ dθ for `k > -1`.
pub fn sin_power_integral(k: f64) -> Result<f64> {
    ln_sin_power_integral(k).map(f64::exp)
}

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

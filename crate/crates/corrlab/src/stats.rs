//! Summary statistics and goodness-of-fit tests for the harness.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Sample mean and standard error of the mean, summed in slice order.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `(estimate − expected) / se`.
pub fn z_score(estimate: f64, expected: f64, se: f64) -> f64 {
    if se > 0.0 {
        (estimate - expected) / se
    } else if estimate == expected {
        0.0
    } else {
        f64::INFINITY
    }
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// One-sample Kolmogorov–Smirnov statistic `sup |F_n − F|`.
pub fn ks_statistic(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let v = sorted(xs);
    let n = v.len() as f64;
    v.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_m − G_n|`.
pub fn ks_two_sample_statistic(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Kolmogorov tail `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}`.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value of a KS statistic `d` at effective sample size
/// `n_eff`, with the Stephens small-sample correction.
pub fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    kolmogorov_tail((s + 0.12 + 0.11 / s) * d)
}

pub fn ks_test(xs: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let d = ks_statistic(xs, cdf);
    (d, ks_p_value(d, xs.len() as f64))
}

pub fn ks_two_sample_test(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d = ks_two_sample_statistic(a, b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    (d, ks_p_value(d, na * nb / (na + nb)))
}

/// Pearson χ² goodness of fit of `xs` against a CDF over equal-width bins
/// on `[lo, hi]`. Returns `(statistic, degrees of freedom, p-value)`.
pub fn chi_square_gof(xs: &[f64], cdf: impl Fn(f64) -> f64, lo: f64, hi: f64, bins: usize) -> (f64, usize, f64) {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in xs {
        let b = (((x - lo) / width).floor().max(0.0) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = xs.len() as f64;
    let stat = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let p = cdf(lo + (i + 1) as f64 * width) - cdf(lo + i as f64 * width);
            let e = n * p;
            (c as f64 - e).powi(2) / e
        })
        .sum::<f64>();
    let df = bins - 1;
    (stat, df, chi_square_sf(stat, df as f64))
}

/// Upper tail of the χ² distribution.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    ChiSquared::new(df).expect("positive degrees of freedom").sf(x)
}

pub fn chi_square_cdf(x: f64, df: f64) -> f64 {
    ChiSquared::new(df).expect("positive degrees of freedom").cdf(x)
}

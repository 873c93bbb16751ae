//! Verification suites. Each turns a family of invariants into report
//! records; Monte Carlo suites draw trial `i` from substream `i`.

use std::f64::consts::PI;
use std::time::Instant;

use corrlab_core::algebra::{log_det, partial_corr_from_schur, schur_complement, CorrelationMatrix, Field, Scalar};
use corrlab_core::measures::{
    angle_exponent, det_moment, expected_log_det, log_density, log_det_from_angles, log_det_moment,
    log_jacobian_hyperspherical, log_normalisation, log_normalisation_form, log_volume_real_beta_product,
    log_volume_real_binomial, marginal_cdf, marginal_pdf, DensityParams, NormalisationForm,
};
use corrlab_core::param::{
    angle_count, angles_to_cholesky, angles_to_partials, cholesky_to_angles, partial_corr_recursion,
    partial_cov_recursion, partials_from_schur, partials_to_cholesky, row_len, AngleSet,
};
use corrlab_core::quadrature::{integrate, integrate_box};
use corrlab_core::sampling::{
    elliptope_angles, gaussian_construction, normalised_random_correlation, random_positive_definite, sample_angles,
    sample_correlation, uniform_angles, uniform_candidate_is_pd, GaussianConstructionParams, StreamRng,
};

use crate::config::{ExperimentConfig, Suite};
use crate::error::CliError;
use crate::fd::{fd_jacobian_abs_det, FD_STEP};
use crate::mc::run_trials;
use crate::report::{Criterion, Record};
use crate::stats::{chi_square_cdf, chi_square_gof, ks_test, ks_two_sample_test, mean_and_se};
use crate::with_scalar;

/// Statistical thresholds shared by every suite.
pub const MAX_Z: f64 = 3.0;
pub const MIN_P: f64 = 0.001;

pub const ROUNDTRIP_TOL: f64 = 1e-12;
pub const SCHUR_TOL: f64 = 1e-11;
pub const LOG_DET_TOL: f64 = 1e-11;
pub const JACOBIAN_TOL: f64 = 1e-5;
pub const FORMS_TOL: f64 = 1e-12;
pub const VOLUME_TOL: f64 = 1e-12;
pub const QUADRATURE_TOL: f64 = 1e-10;
pub const DENSITY_MASS_TOL: f64 = 1e-8;
pub const DERIVATIVE_TOL: f64 = 1e-8;
pub const MARGINAL_BINS: usize = 50;

type SuiteResult = Result<Vec<Record>, CliError>;

fn core_err(e: corrlab_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

pub fn run_suite(suite: Suite, cfg: &ExperimentConfig) -> SuiteResult {
    match suite {
        Suite::Roundtrip => with_scalar!(cfg.field, S => roundtrip::<S>(cfg)),
        Suite::Schur => with_scalar!(cfg.field, S => schur::<S>(cfg)),
        Suite::JacobianFd => with_scalar!(cfg.field, S => jacobian_fd::<S>(cfg)),
        Suite::NormalisationQuadrature => with_scalar!(cfg.field, S => normalisation_quadrature::<S>(cfg)),
        Suite::VolumeIdentity => volume_identity(cfg),
        Suite::MomentsMc => with_scalar!(cfg.field, S => moments_mc::<S>(cfg)),
        Suite::MarginalFit => with_scalar!(cfg.field, S => marginal_fit::<S>(cfg)),
        Suite::GaussianMatch => with_scalar!(cfg.field, S => gaussian_match::<S>(cfg)),
        Suite::PdProbability => with_scalar!(cfg.field, S => pd_probability::<S>(cfg)),
        Suite::Chi2Limit => with_scalar!(cfg.field, S => chi2_limit::<S>(cfg)),
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter()
        .fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

fn column(rows: &[[f64; 4]], i: usize) -> impl Iterator<Item = f64> + '_ {
    rows.iter().map(move |r| r[i])
}

fn roundtrip<S: Scalar>(cfg: &ExperimentConfig) -> SuiteResult {
    let started = Instant::now();
    let max_n = cfg.max_n;
    let errors = run_trials(cfg.seed, cfg.trials, cfg.workers, |i, rng| -> [f64; 4] {
        let n = 1 + i as usize % max_n;
        let a = uniform_angles::<S, _>(n, rng);
        let l = angles_to_cholesky(&a);
        let via_angles = cholesky_to_angles(&l).map(|b| angles_to_cholesky(&b).as_matrix().max_abs_diff(l.as_matrix()));

        // partial-correlation and matrix routes on well-conditioned draws
        let b = elliptope_angles::<S, _>(n, rng);
        let lb = angles_to_cholesky(&b);
        let via_partials = partials_to_cholesky(&angles_to_partials(&b))
            .as_matrix()
            .max_abs_diff(lb.as_matrix());
        let r = CorrelationMatrix::from_factor(&lb);
        let via_matrix = r
            .as_ref()
            .ok()
            .and_then(|r| r.cholesky().ok())
            .map(|l2| l2.as_matrix().max_abs_diff(lb.as_matrix()));
        let det_err = r
            .ok()
            .and_then(|r| log_det(r.as_matrix()).ok())
            .map(|d| (d - log_det_from_angles(&b)).abs() / d.abs().max(1.0));
        [
            via_angles.unwrap_or(f64::NAN),
            via_partials,
            via_matrix.unwrap_or(f64::NAN),
            det_err.unwrap_or(f64::NAN),
        ]
    });
    let n = cfg.trials;
    Ok(vec![
        Record::max_error(
            "factor -> angles -> factor",
            max_of(column(&errors, 0)),
            ROUNDTRIP_TOL,
            n,
            started,
        ),
        Record::max_error(
            "angles -> partial correlations -> factor",
            max_of(column(&errors, 1)),
            ROUNDTRIP_TOL,
            n,
            started,
        ),
        Record::max_error(
            "factor -> correlation -> factor",
            max_of(column(&errors, 2)),
            ROUNDTRIP_TOL,
            n,
            started,
        ),
        Record::max_error(
            "log det from angles vs Cholesky (relative)",
            max_of(column(&errors, 3)),
            LOG_DET_TOL,
            n,
            started,
        ),
    ])
}

fn schur<S: Scalar>(cfg: &ExperimentConfig) -> SuiteResult {
    let started = Instant::now();
    let max_n = cfg.max_n.max(2);
    let errors = run_trials(cfg.seed, cfg.trials, cfg.workers, |i, rng| -> [f64; 4] {
        let n = 2 + i as usize % (max_n - 1);
        let a = elliptope_angles::<S, _>(n, rng);
        let r = CorrelationMatrix::from_factor(&angles_to_cholesky(&a)).expect("unit rows");
        let angles_vs_schur = partials_from_schur(&r).map_or(f64::NAN, |t| angles_to_partials(&a).max_abs_diff(&t));

        let n = 1 + i as usize % max_n;
        let s = random_positive_definite::<S, _>(n, rng);
        let cov = partial_cov_recursion(&s).map_or(f64::NAN, |t| {
            max_of((0..n).map(|p| {
                schur_complement(&s, p + 1).map_or(f64::NAN, |sc| t.level(p).max_abs_diff(&sc) / s.max_diag())
            }))
        });
        let rc = normalised_random_correlation::<S, _>(n, rng);
        let corr = partial_corr_recursion(&rc).map_or(f64::NAN, |t| {
            max_of(
                (0..n).map(|p| partial_corr_from_schur(&rc, p + 1).map_or(f64::NAN, |d| t.level(p).max_abs_diff(&d))),
            )
        });
        [angles_vs_schur, cov, corr, 0.0]
    });
    let n = cfg.trials;
    Ok(vec![
        Record::max_error(
            "angle partial correlations vs Schur complements",
            max_of(column(&errors, 0)),
            SCHUR_TOL,
            n,
            started,
        ),
        Record::max_error(
            "partial covariance recursion vs Schur (relative to max diagonal)",
            max_of(column(&errors, 1)),
            SCHUR_TOL,
            n,
            started,
        ),
        Record::max_error(
            "partial correlation recursion vs Schur",
            max_of(column(&errors, 2)),
            SCHUR_TOL,
            n,
            started,
        ),
    ])
}

/// Points for the finite-difference check: uniform on (0, π), redrawn
/// until every angle is at least `0.05` from the boundary so the ±h
/// stencil and the conditioning of J stay meaningful.
/// Interior point drawn from the a = 0 law, at least ten steps from 0 and π.
fn jacobian_point<S: Scalar>(n: usize, rng: &mut StreamRng) -> AngleSet<S> {
    loop {
        let a = elliptope_angles::<S, _>(n, rng);
        if a.as_slice()
            .iter()
            .all(|&t| t > 10.0 * FD_STEP && t < PI - 10.0 * FD_STEP)
        {
            return a;
        }
    }
}

fn jacobian_fd<S: Scalar>(cfg: &ExperimentConfig) -> SuiteResult {
    let mut out = Vec::new();
    for n in 2..=cfg.max_n.max(2) {
        let started = Instant::now();
        let seed = cfg.seed ^ ((n as u64) << 32);
        let errors = run_trials(seed, cfg.trials, cfg.workers, |_, rng| {
            let a = jacobian_point::<S>(n, rng);
            let want = log_jacobian_hyperspherical(&a).exp();
            (fd_jacobian_abs_det(&a, FD_STEP) - want).abs() / want
        });
        out.push(Record::max_error(
            format!("{} N={n}: |det FD Jacobian| vs closed form (relative)", S::FIELD),
            max_of(errors),
            JACOBIAN_TOL,
            cfg.trials,
            started,
        ));
    }
    Ok(out)
}

fn normalisation_quadrature<S: Scalar>(cfg: &ExperimentConfig) -> SuiteResult {
    let mut out = Vec::new();
    let beta = S::BETA;
    for n in 1..=cfg.max_n.min(3) {
        let started = Instant::now();
        let params = DensityParams::new(cfg.a, S::FIELD, n).map_err(core_err)?;
        let mut by_quadrature = 0.0;
        for j in 2..=n {
            for p in 1..=row_len(beta, j) {
                let e = angle_exponent(j, p, &params).map_err(core_err)?;
                by_quadrature += integrate(|t: f64| t.sin().powf(e), 0.0, PI, 1e-13).ln();
            }
        }
        let closed = log_normalisation(&params).map_err(core_err)?;
        out.push(
            Record::compare(
                format!("{} N={n} a={}: ln C by slot quadrature", S::FIELD, cfg.a),
                closed,
                by_quadrature,
                Criterion::RelativeError { tol: QUADRATURE_TOL },
                started,
            )
            .in_log_scale(),
        );
    }

    let started = Instant::now();
    let params = DensityParams::new(cfg.a, S::FIELD, 2).map_err(core_err)?;
    let mass = integrate_box(
        |t| {
            AngleSet::<S>::from_flat(2, t.to_vec())
                .and_then(|a| log_density(&a, &params))
                .map_or(f64::NAN, f64::exp)
        },
        &vec![(0.0, PI); beta],
        24,
        2,
    );
    out.push(Record::compare(
        format!("{} N=2 a={}: density mass over the angle box", S::FIELD, cfg.a),
        1.0,
        mass,
        Criterion::AbsoluteError { tol: DENSITY_MASS_TOL },
        started,
    ));

    // the three product forms, all fields
    let started = Instant::now();
    let mut worst = [0.0f64; 3];
    let mut grid = vec![0.0, 0.5, 1.0, 3.0];
    if !grid.contains(&cfg.a) {
        grid.push(cfg.a);
    }
    for field in Field::ALL {
        for n in 1..=cfg.max_n {
            for &a in &grid {
                let p = DensityParams::new(a, field, n).map_err(core_err)?;
                let slots = log_normalisation(&p).map_err(core_err)?;
                let form = |f| log_normalisation_form(&p, f).map_err(core_err);
                let b = form(NormalisationForm::BetaProduct)?;
                let g = form(NormalisationForm::GammaRatio)?;
                let t = form(NormalisationForm::Telescoped)?;
                let rel = |x: f64, y: f64| ((x - y).exp_m1()).abs();
                worst[0] = worst[0].max(rel(b, g));
                worst[1] = worst[1].max(rel(b, t));
                worst[2] = worst[2].max(rel(b, slots));
            }
        }
    }
    let cases = (Field::ALL.len() * cfg.max_n * grid.len()) as u64;
    out.push(Record::max_error(
        "beta-product vs gamma-ratio form (relative)",
        worst[0],
        FORMS_TOL,
        cases,
        started,
    ));
    out.push(Record::max_error(
        "beta-product vs telescoped form (relative)",
        worst[1],
        FORMS_TOL,
        cases,
        started,
    ));
    out.push(Record::max_error(
        "beta-product form vs slot sum (relative)",
        worst[2],
        FORMS_TOL,
        cases,
        started,
    ));
    Ok(out)
}

fn volume_identity(cfg: &ExperimentConfig) -> SuiteResult {
    let mut out = Vec::new();
    for n in 2..=cfg.max_n.max(2) {
        let started = Instant::now();
        let product = log_volume_real_beta_product(n).map_err(core_err)?.exp();
        let binomial = log_volume_real_binomial(n).map_err(core_err)?.exp();
        out.push(Record::compare(
            format!("real N={n}: beta-product volume vs binomial-beta volume"),
            binomial,
            product,
            Criterion::RelativeError { tol: VOLUME_TOL },
            started,
        ));
    }
    let started = Instant::now();
    let half_pi_sq = PI * PI / 2.0;
    for (name, v) in [
        (
            "real N=3: beta-product volume = pi^2/2",
            log_volume_real_beta_product(3),
        ),
        ("real N=3: binomial-beta volume = pi^2/2", log_volume_real_binomial(3)),
    ] {
        let v = v.map_err(core_err)?.exp();
        out.push(Record::compare(
            name,
            half_pi_sq,
            v,
            Criterion::RelativeError { tol: VOLUME_TOL },
            started,
        ));
    }
    Ok(out)
}

fn density_params<S: Scalar>(cfg: &ExperimentConfig) -> Result<DensityParams, CliError> {
    DensityParams::new(cfg.a, S::FIELD, cfg.n_dim).map_err(core_err)
}

fn label<S: Scalar>(cfg: &ExperimentConfig) -> String {
    format!("{} N={} a={}", S::FIELD, cfg.n_dim, cfg.a)
}

/// ln det R of `trials` draws from the `(det R)^a` sampler, from the sampled
/// angles.
pub fn sampled_log_dets<S: Scalar>(cfg: &ExperimentConfig) -> Result<Vec<f64>, CliError> {
    let params = density_params::<S>(cfg)?;
    run_trials(cfg.seed, cfg.trials, cfg.workers, |_, rng| {
        sample_angles::<S, _>(&params, rng).map(|a| log_det_from_angles(&a))
    })
    .into_iter()
    .collect::<Result<_, _>>()
    .map_err(core_err)
}

fn moments_mc<S: Scalar>(cfg: &ExperimentConfig) -> SuiteResult {
    let started = Instant::now();
    let params = density_params::<S>(cfg)?;
    let log_dets = sampled_log_dets::<S>(cfg)?;
    let n = cfg.trials;
    let det: Vec<f64> = log_dets.iter().map(|l| l.exp()).collect();
    let det2: Vec<f64> = log_dets.iter().map(|l| (2.0 * l).exp()).collect();
    let mut out = Vec::new();
    for (name, xs, want) in [
        ("E det R", &det, det_moment(1.0, &params)),
        ("E (det R)^2", &det2, det_moment(2.0, &params)),
        ("E log det R", &log_dets, expected_log_det(&params)),
    ] {
        let (m, se) = mean_and_se(xs);
        out.push(Record::z_test(
            format!("{}: {name}", label::<S>(cfg)),
            want.map_err(core_err)?,
            m,
            se,
            n,
            MAX_Z,
            started,
        ));
    }

    let started = Instant::now();
    // five-point stencil; every beta argument a + (βk+1−l)/2 + s stays above a + 1 − 2h > 0
    let h = 1e-3 * (cfg.a + 1.0).min(1.0);
    let f = |s: f64| log_det_moment(s, &params).map_err(core_err);
    let fd = (8.0 * (f(h)? - f(-h)?) - (f(2.0 * h)? - f(-2.0 * h)?)) / (12.0 * h);
    out.push(Record::compare(
        format!("{}: E log det R vs d/ds ln E (det R)^s at 0", label::<S>(cfg)),
        expected_log_det(&params).map_err(core_err)?,
        fd,
        Criterion::AbsoluteError { tol: DERIVATIVE_TOL },
        started,
    ));

    if S::FIELD == Field::Real && cfg.n_dim == 2 {
        // E(1 − ρ²) against the marginal law, with ρ = cos θ
        let started = Instant::now();
        let brute = integrate(
            |t: f64| t.sin().powi(3) * marginal_pdf(t.cos(), &params).unwrap_or(0.0),
            0.0,
            PI,
            1e-14,
        );
        out.push(Record::compare(
            format!("{}: E det R by direct integration", label::<S>(cfg)),
            det_moment(1.0, &params).map_err(core_err)?,
            brute,
            Criterion::RelativeError { tol: 1e-10 },
            started,
        ));
    }
    Ok(out)
}

/// Real part of `ρ₂₁` for `trials` sampler draws.
pub fn sampled_rho21<S: Scalar>(cfg: &ExperimentConfig) -> Result<Vec<f64>, CliError> {
    let params = density_params::<S>(cfg)?;
    run_trials(cfg.seed, cfg.trials, cfg.workers, |_, rng| {
        sample_correlation::<S, _>(&params, rng).map(|r| r.as_matrix()[(1, 0)].re())
    })
    .into_iter()
    .collect::<Result<_, _>>()
    .map_err(core_err)
}

fn marginal_fit<S: Scalar>(cfg: &ExperimentConfig) -> SuiteResult {
    let started = Instant::now();
    let params = density_params::<S>(cfg)?;
    let rho = sampled_rho21::<S>(cfg)?;
    let cdf = |x: f64| marginal_cdf(x, &params).unwrap_or(f64::NAN);
    let (stat, df, p) = chi_square_gof(&rho, cdf, -1.0, 1.0, MARGINAL_BINS);
    Ok(vec![Record::p_test(
        format!(
            "{}: chi-square fit of Re rho21 to the marginal density ({df} df)",
            label::<S>(cfg)
        ),
        stat,
        p,
        cfg.trials,
        MIN_P,
        started,
    )])
}

fn gaussian_match<S: Scalar>(cfg: &ExperimentConfig) -> SuiteResult {
    let started = Instant::now();
    let n_samples = cfg.gaussian_n.unwrap_or(cfg.n_dim + 1);
    let g = GaussianConstructionParams::new(n_samples, cfg.n_dim, S::FIELD).map_err(core_err)?;
    let params = g.density_params().map_err(core_err)?;
    let draws = run_trials(
        cfg.seed,
        cfg.trials,
        cfg.workers,
        |_, rng| -> corrlab_core::Result<[f64; 4]> {
            let x = gaussian_construction::<S, _>(&g, rng)?;
            let angles = sample_angles::<S, _>(&params, rng)?;
            let y = CorrelationMatrix::from_factor(&angles_to_cholesky(&angles))?;
            Ok([
                x.log_det()?,
                x.as_matrix()[(1, 0)].re(),
                log_det_from_angles(&angles),
                y.as_matrix()[(1, 0)].re(),
            ])
        },
    )
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(core_err)?;
    let col = |i| column(&draws, i).collect::<Vec<_>>();
    let name = format!("{} N={} n={} (a={})", S::FIELD, cfg.n_dim, n_samples, g.implied_a());
    let (d_det, p_det) = ks_two_sample_test(&col(0), &col(2));
    let (d_rho, p_rho) = ks_two_sample_test(&col(1), &col(3));
    Ok(vec![
        Record::p_test(
            format!("{name}: two-sample KS on log det R"),
            d_det,
            p_det,
            cfg.trials,
            MIN_P,
            started,
        ),
        Record::p_test(
            format!("{name}: two-sample KS on Re rho21"),
            d_rho,
            p_rho,
            cfg.trials,
            MIN_P,
            started,
        ),
    ])
}

fn pd_probability<S: Scalar>(cfg: &ExperimentConfig) -> SuiteResult {
    let started = Instant::now();
    let n = cfg.n_dim;
    let hits: Vec<f64> = run_trials(cfg.seed, cfg.trials, cfg.workers, |_, rng| {
        if uniform_candidate_is_pd::<S, _>(n, rng) {
            1.0
        } else {
            0.0
        }
    });
    let (m, se) = mean_and_se(&hits);
    let want = corrlab_core::measures::pd_probability(n, S::FIELD).map_err(core_err)?;
    Ok(vec![Record::z_test(
        format!("{} N={n}: P(uniform-entry matrix is positive definite)", S::FIELD),
        want,
        m,
        se,
        cfg.trials,
        MAX_Z,
        started,
    )])
}

fn chi2_limit<S: Scalar>(cfg: &ExperimentConfig) -> SuiteResult {
    let started = Instant::now();
    let dof = angle_count(S::BETA, cfg.n_dim) as f64;
    let scaled: Vec<f64> = sampled_log_dets::<S>(cfg)?.iter().map(|l| -2.0 * cfg.a * l).collect();
    let (d, p) = ks_test(&scaled, |x| chi_square_cdf(x, dof));
    Ok(vec![Record::p_test(
        format!("{}: KS of -2a log det R against chi-square({dof})", label::<S>(cfg)),
        d,
        p,
        cfg.trials,
        MIN_P,
        started,
    )])
}

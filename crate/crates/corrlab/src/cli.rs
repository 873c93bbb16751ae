//! `corrlab <sample|eval|verify>`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use corrlab_core::algebra::{CorrelationMatrix, Field, MatrixJson, Scalar, ScalarJson};
use corrlab_core::measures::{
    log_density, log_density_matrix, log_det_from_angles, log_jacobian_hyperspherical, log_jacobian_partials,
    DensityParams,
};
use corrlab_core::param::{
    angles_to_cholesky, angles_to_partials, cholesky_to_angles, AngleSet, AngleSetJson, PartialCorrelationTable,
};
use corrlab_core::sampling::{gaussian_construction, sample_angles, GaussianConstructionParams};
use serde::Serialize;

use crate::config::{Command, Construction, Emit, ExperimentConfig, Format, Settings, Suite};
use crate::error::CliError;
use crate::mc::run_trials;
use crate::report::{Criterion, ExperimentReport, Record};
use crate::suites::run_suite;
use crate::with_scalar;

pub const SAMPLES_SCHEMA: &str = "corrlab-samples/1";
pub const EVAL_SCHEMA: &str = "corrlab-eval/1";

#[derive(Debug, Parser)]
#[command(
    name = "corrlab",
    version,
    about = "Sample, evaluate and verify (det R)^a correlation-matrix laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Draw correlation matrices, or their angles, from the (det R)^a law
    Sample(Flags),
    /// Evaluate log-density, log-det, Jacobians and partial correlations of an input
    Eval(Flags),
    /// Run a verification suite and emit a report
    Verify {
        /// roundtrip, schur, jacobian-fd, normalisation-quadrature, volume-identity,
        /// moments-mc, marginal-fit, gaussian-match, pd-probability or chi2-limit
        suite: String,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Debug, Args)]
struct Flags {
    /// real, complex or quaternion
    #[arg(long)]
    field: Option<Field>,
    /// Matrix dimension N
    #[arg(long)]
    n_dim: Option<usize>,
    /// Determinant exponent, > -1
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, value_enum)]
    construction: Option<Construction>,
    /// Rows of the Gaussian data matrix (default N + 1)
    #[arg(long)]
    gaussian_n: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    /// RNG seed; drawn from system entropy and echoed when absent
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output path (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Largest N for suites that sweep the dimension
    #[arg(long)]
    max_n: Option<usize>,
    /// What `sample` writes per trial
    #[arg(long, value_enum)]
    emit: Option<Emit>,
    /// Matrix or angle JSON for `eval`
    #[arg(long)]
    input: Option<PathBuf>,
    /// JSON file with the same keys as the flags; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn settings(self) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let flags = Settings {
            field: self.field,
            n_dim: self.n_dim,
            a: self.a,
            construction: self.construction,
            gaussian_n: self.gaussian_n,
            trials: self.trials,
            seed: self.seed,
            workers: self.workers,
            out: self.out,
            format: self.format,
            max_n: self.max_n,
            emit: self.emit,
            input: self.input,
        };
        Ok(flags.over(file))
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("corrlab: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Sub::Sample(flags) => cmd_sample(&ExperimentConfig::resolve(Command::Sample, None, flags.settings()?)?),
        Sub::Eval(flags) => cmd_eval(&ExperimentConfig::resolve(Command::Eval, None, flags.settings()?)?),
        Sub::Verify { suite, flags } => {
            let suite: Suite = suite.parse().map_err(CliError::Config)?;
            let cfg = ExperimentConfig::resolve(Command::Verify, Some(suite), flags.settings()?)?;
            let report = verify(&cfg)?;
            write_output(&cfg, &to_json(&report)?)?;
            for r in &report.records {
                eprintln!("{}", summary_line(r));
            }
            if report.passed {
                Ok(())
            } else {
                let failed = report.failures().count();
                Err(CliError::Failed(format!(
                    "{failed} of {} checks failed",
                    report.records.len()
                )))
            }
        }
    }
}

/// Runs the suite named in `cfg`.
pub fn verify(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let suite = cfg.suite.ok_or_else(|| CliError::Config("no suite given".into()))?;
    let started = Instant::now();
    let records = run_suite(suite, cfg)?;
    Ok(ExperimentReport::new(
        suite.name(),
        cfg.clone(),
        records,
        started.elapsed().as_secs_f64(),
    ))
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn write_output(cfg: &ExperimentConfig, bytes: &[u8]) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, bytes).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}"))),
    }
}

#[derive(Debug, Serialize)]
struct SampleMetadata {
    field: Field,
    n: usize,
    construction: Construction,
    /// Exponent of the sampled law; the implied one for the Gaussian construction.
    a: f64,
    gaussian_n: Option<usize>,
    implied_a: Option<f64>,
    trials: u64,
    seed: u64,
    seed_from_entropy: bool,
    emit: Emit,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum SampleItem {
    Matrix(MatrixJson),
    Angles(AngleSetJson),
}

#[derive(Debug, Serialize)]
struct SampleDocument {
    schema: &'static str,
    metadata: SampleMetadata,
    samples: Vec<SampleItem>,
}

fn cmd_sample(cfg: &ExperimentConfig) -> Result<(), CliError> {
    with_scalar!(cfg.field, S => sample_impl::<S>(cfg))
}

fn sample_impl<S: Scalar>(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let config_err = |e: corrlab_core::Error| CliError::Config(e.to_string());
    let gaussian = match cfg.construction {
        Construction::Gaussian => {
            let n = cfg.gaussian_n.unwrap_or(cfg.n_dim + 1);
            Some(GaussianConstructionParams::new(n, cfg.n_dim, S::FIELD).map_err(config_err)?)
        }
        Construction::Angles => None,
    };
    let a = gaussian.map_or(cfg.a, |g| g.implied_a());
    let params = DensityParams::new(a, S::FIELD, cfg.n_dim).map_err(config_err)?;
    let draws: Vec<Draw<S>> = run_trials(cfg.seed, cfg.trials, cfg.workers, |_, rng| match &gaussian {
        Some(g) => gaussian_construction::<S, _>(g, rng).map(|matrix| Draw { matrix, angles: None }),
        None => sample_angles::<S, _>(&params, rng).and_then(|a| {
            let matrix = CorrelationMatrix::from_factor(&angles_to_cholesky(&a))?;
            Ok(Draw {
                matrix,
                angles: Some(a),
            })
        }),
    })
    .into_iter()
    .collect::<Result<_, _>>()
    .map_err(|e| CliError::Failed(format!("sampler produced an invalid matrix: {e}")))?;

    let bytes = match cfg.format {
        Format::Csv => sample_csv(&draws, &params)?,
        Format::Json => {
            let samples = draws
                .iter()
                .map(|d| match cfg.emit {
                    Emit::Matrix => Ok(SampleItem::Matrix(MatrixJson::from_matrix(d.matrix.as_matrix()))),
                    Emit::Angles => d.angles().map(|t| SampleItem::Angles(AngleSetJson::from_angles(&t))),
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Failed(e.to_string()))?;
            let doc = SampleDocument {
                schema: SAMPLES_SCHEMA,
                metadata: SampleMetadata {
                    field: S::FIELD,
                    n: cfg.n_dim,
                    construction: cfg.construction,
                    a,
                    gaussian_n: gaussian.map(|g| g.n_samples),
                    implied_a: gaussian.map(|g| g.implied_a()),
                    trials: cfg.trials,
                    seed: cfg.seed,
                    seed_from_entropy: cfg.seed_from_entropy,
                    emit: cfg.emit,
                },
                samples,
            };
            to_json(&doc)?
        }
    };
    write_output(cfg, &bytes)
}

/// One sampled matrix, with its angles when the angle sampler drew it.
struct Draw<S> {
    matrix: CorrelationMatrix<S>,
    angles: Option<AngleSet<S>>,
}

impl<S: Scalar> Draw<S> {
    fn angles(&self) -> corrlab_core::Result<AngleSet<S>> {
        match &self.angles {
            Some(a) => Ok(a.clone()),
            None => self.matrix.cholesky().and_then(|l| cholesky_to_angles(&l)),
        }
    }

    fn log_det(&self) -> corrlab_core::Result<f64> {
        match &self.angles {
            Some(a) => Ok(log_det_from_angles(a)),
            None => self.matrix.log_det(),
        }
    }
}

/// Scalar series only: `trial,det,log_det,rho21_re,log_density`.
fn sample_csv<S: Scalar>(draws: &[Draw<S>], params: &DensityParams) -> Result<Vec<u8>, CliError> {
    let mut out = String::from("trial,det,log_det,rho21_re,log_density\n");
    for (i, d) in draws.iter().enumerate() {
        let ld = d.log_det().map_err(|e| CliError::Failed(e.to_string()))?;
        let dens = log_density_matrix(ld, params).map_err(|e| CliError::Config(e.to_string()))?;
        let r = d.matrix.as_matrix();
        let rho = if r.dim() >= 2 {
            r[(1, 0)].re().to_string()
        } else {
            String::new()
        };
        out.push_str(&format!("{i},{},{ld},{rho},{dens}\n", ld.exp()));
    }
    Ok(out.into_bytes())
}

#[derive(Debug, Serialize)]
struct EvalDocument {
    schema: &'static str,
    field: Field,
    n: usize,
    a: f64,
    log_det: f64,
    log_det_from_angles: f64,
    /// With respect to the real coordinates of the strict lower triangle.
    log_density: f64,
    /// With respect to the angles.
    log_density_angles: f64,
    log_jacobian_hyperspherical: f64,
    /// Real field only.
    log_jacobian_partials: Option<f64>,
    angles: Vec<Vec<f64>>,
    /// Row `j = 2..=N` holds `ρ_{jk|1..k−1}` for `k < j`.
    partial_correlations: Vec<Vec<ScalarJson>>,
    cholesky: MatrixJson,
    matrix: MatrixJson,
}

fn cmd_eval(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let path = cfg.input.as_ref().expect("validated");
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{} is not valid JSON: {e}", path.display())))?;
    let parse_err = |e: serde_json::Error| CliError::Input(format!("malformed input: {e}"));
    let doc = if value.get("entries").is_some() {
        let m: MatrixJson = serde_json::from_value(value).map_err(parse_err)?;
        with_scalar!(m.field, S => eval_matrix::<S>(&m, cfg.a))?
    } else if value.get("rows").is_some() {
        let a: AngleSetJson = serde_json::from_value(value).map_err(parse_err)?;
        with_scalar!(a.field, S => eval_angles::<S>(&a, cfg.a))?
    } else {
        return Err(CliError::Input(
            "expected a matrix {field, n, entries} or an angle set {field, n, rows}".into(),
        ));
    };
    write_output(cfg, &to_json(&doc)?)
}

fn input_err(e: corrlab_core::Error) -> CliError {
    CliError::Input(e.to_string())
}

fn eval_matrix<S: Scalar>(m: &MatrixJson, a: f64) -> Result<EvalDocument, CliError> {
    let r = CorrelationMatrix::new(m.to_matrix::<S>().map_err(input_err)?).map_err(input_err)?;
    let angles = r.cholesky().and_then(|l| cholesky_to_angles(&l)).map_err(input_err)?;
    evaluate(&r, &angles, a)
}

fn eval_angles<S: Scalar>(js: &AngleSetJson, a: f64) -> Result<EvalDocument, CliError> {
    let angles = js.to_angles::<S>().map_err(input_err)?;
    let r = CorrelationMatrix::from_factor(&angles_to_cholesky(&angles)).map_err(input_err)?;
    evaluate(&r, &angles, a)
}

fn evaluate<S: Scalar>(r: &CorrelationMatrix<S>, angles: &AngleSet<S>, a: f64) -> Result<EvalDocument, CliError> {
    let n = r.dim();
    let params = DensityParams::new(a, S::FIELD, n).map_err(|e| CliError::Config(e.to_string()))?;
    let log_det = r.log_det().map_err(input_err)?;
    let partials = angles_to_partials(angles);
    let log_jacobian_partials = if S::FIELD == Field::Real {
        let real = PartialCorrelationTable::<f64>::new(n, partials.entries().iter().map(|x| x.re()).collect())
            .map_err(input_err)?;
        Some(log_jacobian_partials(&real))
    } else {
        None
    };
    let partial_correlations = (2..=n)
        .map(|j| (1..j).map(|k| ScalarJson::from_scalar(partials.get(j, k))).collect())
        .collect();
    Ok(EvalDocument {
        schema: EVAL_SCHEMA,
        field: S::FIELD,
        n,
        a,
        log_det,
        log_det_from_angles: log_det_from_angles(angles),
        log_density: log_density_matrix(log_det, &params).map_err(input_err)?,
        log_density_angles: log_density(angles, &params).map_err(input_err)?,
        log_jacobian_hyperspherical: log_jacobian_hyperspherical(angles),
        log_jacobian_partials,
        angles: angles.rows(),
        partial_correlations,
        cholesky: MatrixJson::from_matrix(angles_to_cholesky(angles).as_matrix()),
        matrix: MatrixJson::from_matrix(r.as_matrix()),
    })
}

fn criterion_label(c: &Criterion) -> String {
    match c {
        Criterion::ZScore { max_z } => format!("|z| <= {max_z}"),
        Criterion::PValue { min_p } => format!("p > {min_p}"),
        Criterion::AbsoluteError { tol } => format!("abs error <= {tol:e}"),
        Criterion::RelativeError { tol } => format!("relative error <= {tol:e}"),
        Criterion::MaxError { tol } => format!("max error <= {tol:e}"),
    }
}

/// One line per record, for terminals and the acceptance log.
pub fn summary_line(r: &Record) -> String {
    let detail = match (r.closed_form, r.z_score, r.p_value) {
        (Some(c), Some(z), _) => format!("estimate {:.6e} vs {:.6e}, z = {z:.2}", r.estimate, c),
        (_, _, Some(p)) => format!("statistic {:.4e}, p = {p:.3e}", r.estimate),
        (Some(c), None, None) => format!("{:.15e} vs {:.15e}", r.estimate, c),
        (None, _, None) => format!("{:.3e}", r.estimate),
    };
    format!(
        "{} {} [{}; {}]",
        if r.passed { "PASS" } else { "FAIL" },
        r.name,
        detail,
        criterion_label(&r.criterion)
    )
}

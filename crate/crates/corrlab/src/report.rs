//! Self-describing experiment reports (`corrlab-report/1`).

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

pub const REPORT_SCHEMA: &str = "corrlab-report/1";

/// How a record decides pass/fail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    /// `|z| ≤ max_z`
    ZScore { max_z: f64 },
    /// `p > min_p`
    PValue { min_p: f64 },
    /// `|estimate − closed_form| ≤ tol`
    AbsoluteError { tol: f64 },
    /// `|estimate − closed_form| ≤ tol · max(1, |closed_form|)`
    RelativeError { tol: f64 },
    /// `estimate ≤ tol`, for error maxima computed inside the suite.
    MaxError { tol: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    /// Reference value; log scale when `log_scale` is set.
    pub closed_form: Option<f64>,
    pub estimate: f64,
    pub std_error: Option<f64>,
    pub z_score: Option<f64>,
    pub p_value: Option<f64>,
    pub log_scale: bool,
    pub samples: Option<u64>,
    pub criterion: Criterion,
    pub passed: bool,
    pub duration_secs: f64,
}

impl Record {
    fn finish(mut self, started: Instant) -> Self {
        self.duration_secs = started.elapsed().as_secs_f64();
        self
    }

    fn blank(name: impl Into<String>, criterion: Criterion, estimate: f64) -> Self {
        Record {
            name: name.into(),
            closed_form: None,
            estimate,
            std_error: None,
            z_score: None,
            p_value: None,
            log_scale: false,
            samples: None,
            criterion,
            passed: false,
            duration_secs: 0.0,
        }
    }

    /// Monte Carlo mean against a closed form at `|z| ≤ max_z`.
    pub fn z_test(
        name: impl Into<String>,
        closed_form: f64,
        mean: f64,
        se: f64,
        n: u64,
        max_z: f64,
        started: Instant,
    ) -> Self {
        let z = crate::stats::z_score(mean, closed_form, se);
        let mut r = Self::blank(name, Criterion::ZScore { max_z }, mean);
        r.closed_form = Some(closed_form);
        r.std_error = Some(se);
        r.z_score = Some(z);
        r.samples = Some(n);
        r.passed = z.abs() <= max_z;
        r.finish(started)
    }

    /// A test statistic with p-value, passing when `p > min_p`.
    pub fn p_test(name: impl Into<String>, statistic: f64, p: f64, n: u64, min_p: f64, started: Instant) -> Self {
        let mut r = Self::blank(name, Criterion::PValue { min_p }, statistic);
        r.p_value = Some(p);
        r.samples = Some(n);
        r.passed = p > min_p;
        r.finish(started)
    }

    /// Deterministic comparison of two evaluations of the same quantity.
    pub fn compare(
        name: impl Into<String>,
        closed_form: f64,
        estimate: f64,
        criterion: Criterion,
        started: Instant,
    ) -> Self {
        let diff = (estimate - closed_form).abs();
        let passed = match criterion {
            Criterion::AbsoluteError { tol } => diff <= tol,
            Criterion::RelativeError { tol } => diff <= tol * closed_form.abs().max(1.0),
            _ => panic!("compare needs an error criterion"),
        };
        let mut r = Self::blank(name, criterion, estimate);
        r.closed_form = Some(closed_form);
        r.passed = passed;
        r.finish(started)
    }

    /// A worst-case error found by the suite, passing when `≤ tol`.
    pub fn max_error(name: impl Into<String>, error: f64, tol: f64, n: u64, started: Instant) -> Self {
        let mut r = Self::blank(name, Criterion::MaxError { tol }, error);
        r.samples = Some(n);
        r.passed = error <= tol;
        r.finish(started)
    }

    pub fn in_log_scale(mut self) -> Self {
        self.log_scale = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub suite: String,
    pub config: ExperimentConfig,
    pub records: Vec<Record>,
    pub passed: bool,
    pub duration_secs: f64,
}

impl ExperimentReport {
    pub fn new(suite: impl Into<String>, config: ExperimentConfig, records: Vec<Record>, duration_secs: f64) -> Self {
        let passed = !records.is_empty() && records.iter().all(|r| r.passed);
        Self {
            schema: REPORT_SCHEMA.into(),
            suite: suite.into(),
            config,
            records,
            passed,
            duration_secs,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.passed)
    }
}

//! Experiment configuration: flags merged over an optional JSON config file
//! with the same keys, then validated.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use corrlab_core::algebra::Field;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Sample,
    Eval,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Roundtrip,
    Schur,
    JacobianFd,
    NormalisationQuadrature,
    VolumeIdentity,
    MomentsMc,
    MarginalFit,
    GaussianMatch,
    PdProbability,
    Chi2Limit,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Roundtrip,
        Suite::Schur,
        Suite::JacobianFd,
        Suite::NormalisationQuadrature,
        Suite::VolumeIdentity,
        Suite::MomentsMc,
        Suite::MarginalFit,
        Suite::GaussianMatch,
        Suite::PdProbability,
        Suite::Chi2Limit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Roundtrip => "roundtrip",
            Suite::Schur => "schur",
            Suite::JacobianFd => "jacobian-fd",
            Suite::NormalisationQuadrature => "normalisation-quadrature",
            Suite::VolumeIdentity => "volume-identity",
            Suite::MomentsMc => "moments-mc",
            Suite::MarginalFit => "marginal-fit",
            Suite::GaussianMatch => "gaussian-match",
            Suite::PdProbability => "pd-probability",
            Suite::Chi2Limit => "chi2-limit",
        }
    }

    /// Random cases (or Monte Carlo draws) when `--trials` is absent.
    pub fn default_trials(self) -> u64 {
        match self {
            Suite::Roundtrip | Suite::Schur => 1000,
            Suite::JacobianFd => 100,
            Suite::NormalisationQuadrature | Suite::VolumeIdentity => 1,
            Suite::PdProbability => 1_000_000,
            Suite::MomentsMc | Suite::MarginalFit | Suite::GaussianMatch | Suite::Chi2Limit => 100_000,
        }
    }

    /// Largest dimension of suites that sweep `N` when `--max-n` is absent.
    pub fn default_max_n(self) -> usize {
        match self {
            Suite::JacobianFd => 4,
            Suite::NormalisationQuadrature | Suite::VolumeIdentity => 10,
            _ => 8,
        }
    }

    pub fn default_a(self) -> f64 {
        match self {
            Suite::Chi2Limit => 100.0,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            format!("unknown suite '{s}', expected one of: {}", names.join(", "))
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    #[default]
    Angles,
    Gaussian,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// What `sample` writes per trial.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    #[default]
    Matrix,
    Angles,
}

/// Every setting optional; used for both the config file and the flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Settings {
    pub field: Option<Field>,
    pub n_dim: Option<usize>,
    pub a: Option<f64>,
    pub construction: Option<Construction>,
    pub gaussian_n: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub max_n: Option<usize>,
    pub emit: Option<Emit>,
    pub input: Option<PathBuf>,
}

impl Settings {
    /// Fields set in `self` win over `base`.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            field: self.field.or(base.field),
            n_dim: self.n_dim.or(base.n_dim),
            a: self.a.or(base.a),
            construction: self.construction.or(base.construction),
            gaussian_n: self.gaussian_n.or(base.gaussian_n),
            trials: self.trials.or(base.trials),
            seed: self.seed.or(base.seed),
            workers: self.workers.or(base.workers),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            max_n: self.max_n.or(base.max_n),
            emit: self.emit.or(base.emit),
            input: self.input.or(base.input),
        }
    }

    pub fn from_file(path: &Path) -> Result<Settings, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config file {}: {e}", path.display())))
    }
}

/// Fully resolved configuration, echoed in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub suite: Option<Suite>,
    pub field: Field,
    pub n_dim: usize,
    pub a: f64,
    pub construction: Construction,
    pub gaussian_n: Option<usize>,
    pub trials: u64,
    pub seed: u64,
    pub seed_from_entropy: bool,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub max_n: usize,
    pub emit: Emit,
    pub input: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn resolve(command: Command, suite: Option<Suite>, s: Settings) -> Result<Self, CliError> {
        let (seed, seed_from_entropy) = match s.seed {
            Some(seed) => (seed, false),
            None => (corrlab_core::sampling::entropy_seed(), true),
        };
        let n_dim = s.n_dim.unwrap_or(3);
        let construction = s.construction.unwrap_or_default();
        let gaussian_n = match construction {
            Construction::Gaussian => Some(s.gaussian_n.unwrap_or(n_dim + 1)),
            Construction::Angles => s.gaussian_n,
        };
        let cfg = ExperimentConfig {
            command,
            suite,
            field: s.field.unwrap_or(Field::Real),
            n_dim,
            a: s.a.unwrap_or(suite.map_or(0.0, Suite::default_a)),
            construction,
            gaussian_n,
            trials: s.trials.unwrap_or(match (command, suite) {
                (_, Some(suite)) => suite.default_trials(),
                _ => 1,
            }),
            seed,
            seed_from_entropy,
            workers: s.workers.unwrap_or_else(crate::mc::default_workers),
            out: s.out,
            format: s.format.unwrap_or_default(),
            max_n: s.max_n.unwrap_or(suite.map_or(8, Suite::default_max_n)),
            emit: s.emit.unwrap_or_default(),
            input: s.input,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_dim == 0 {
            return bad("n-dim must be at least 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if !(self.a.is_finite() && self.a > -1.0) {
            return bad(format!("a must be > -1, got {}", self.a));
        }
        if let Some(n) = self.gaussian_n {
            if n < self.n_dim {
                return bad(format!("gaussian-n must be at least n-dim = {}, got {n}", self.n_dim));
            }
        }
        if self.format == Format::Csv && self.command != Command::Sample {
            return bad("csv output is only available for sample".into());
        }
        if self.command == Command::Eval && self.input.is_none() {
            return bad("eval needs --input".into());
        }
        if self.max_n == 0 {
            return bad("max-n must be at least 1".into());
        }
        let needs_pair = matches!(
            self.suite,
            Some(
                Suite::MarginalFit | Suite::GaussianMatch | Suite::PdProbability | Suite::Chi2Limit | Suite::MomentsMc
            )
        );
        if needs_pair && self.n_dim < 2 {
            return bad(format!("suite {} needs n-dim of at least 2", self.suite.unwrap()));
        }
        if self.suite == Some(Suite::Chi2Limit) && self.a <= 0.0 {
            return bad("chi2-limit needs a > 0".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: Settings = serde_json::from_str(r#"{"field":"complex","n-dim":4,"trials":10}"#).unwrap();
        let flags = Settings {
            n_dim: Some(2),
            ..Default::default()
        };
        let merged = flags.over(file);
        assert_eq!(merged.field, Some(Field::Complex));
        assert_eq!(merged.n_dim, Some(2));
        assert_eq!(merged.trials, Some(10));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<Settings>(r#"{"dimension":3}"#).is_err());
    }

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{}\"", s.name()));
        }
        assert!("volume".parse::<Suite>().is_err());
    }

    #[test]
    fn validation() {
        let base = || Settings {
            seed: Some(1),
            ..Default::default()
        };
        let ok = ExperimentConfig::resolve(Command::Sample, None, base()).unwrap();
        assert_eq!((ok.trials, ok.n_dim, ok.a), (1, 3, 0.0));
        let bad = |s: Settings| ExperimentConfig::resolve(Command::Sample, None, s).is_err();
        assert!(bad(Settings {
            a: Some(-1.0),
            ..base()
        }));
        assert!(bad(Settings {
            trials: Some(0),
            ..base()
        }));
        assert!(bad(Settings {
            construction: Some(Construction::Gaussian),
            gaussian_n: Some(2),
            ..base()
        }));
        let g = ExperimentConfig::resolve(
            Command::Sample,
            None,
            Settings {
                construction: Some(Construction::Gaussian),
                ..base()
            },
        )
        .unwrap();
        assert_eq!(g.gaussian_n, Some(4));
        let v = ExperimentConfig::resolve(Command::Verify, Some(Suite::Chi2Limit), base()).unwrap();
        assert_eq!((v.a, v.trials), (100.0, 100_000));
        assert!(ExperimentConfig::resolve(
            Command::Verify,
            Some(Suite::Roundtrip),
            Settings {
                format: Some(Format::Csv),
                ..base()
            }
        )
        .is_err());
    }
}

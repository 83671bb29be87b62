//! TOML run configuration.
//!
//! ```toml
//! regime = "stability"          # base | stability | separation | both
//! seeds = [0, 1, 2]
//! jobs = 0                      # 0: one worker per logical core
//! train_size = 20
//! dataset = "data/ssscsp"       # optional, relative to this file
//!
//! [method]
//! kind = "pool-sp"              # first-fit | greedy | pool-sp
//! scorer = "utilization"        # utilization | constant | program
//! program = "best.score"        # with scorer = "program"
//! constant = 1.0                # with scorer = "constant"
//! beta = 0.0                    # greedy only
//! schedule = [[0.0, 1], [0.05, 200], [0.15, 200]]
//! run_time_limit_secs = 10.0
//! sp_time_limit_secs = 60.0
//! sp_mode = "cover"             # cover | exact
//! ```

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

use super::bench::{BenchOptions, Method, ScoringRule};
use crate::constructive::{ConstraintProfile, Regime};
use crate::dsl::{ParseDiagnostic, ScoreProgram};
use crate::setpart::{PoolOptions, SpMode, SpOptions, DEFAULT_SCHEDULE};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("config: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("program {path}: {diag}")]
    Program { path: String, diag: ParseDiagnostic },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    FirstFit,
    Greedy,
    PoolSp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    #[default]
    Utilization,
    Constant,
    Program,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub kind: MethodKind,
    #[serde(default)]
    pub scorer: ScorerKind,
    pub program: Option<PathBuf>,
    #[serde(default = "one")]
    pub constant: f64,
    #[serde(default)]
    pub beta: f64,
    pub schedule: Option<Vec<(f64, usize)>>,
    pub run_time_limit_secs: Option<f64>,
    pub sp_time_limit_secs: Option<f64>,
    #[serde(default)]
    pub sp_mode: SpMode,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default = "base")]
    pub regime: Regime,
    #[serde(default = "zero_seed")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub jobs: usize,
    #[serde(default = "train_size")]
    pub train_size: usize,
    pub dataset: Option<PathBuf>,
    pub method: MethodConfig,
}

fn base() -> Regime {
    Regime::Base
}

fn zero_seed() -> Vec<u64> {
    vec![0]
}

fn train_size() -> usize {
    crate::instance::TRAIN_SIZE
}

fn secs(v: Option<f64>, what: &str) -> Result<Option<Duration>, ConfigError> {
    match v {
        None => Ok(None),
        Some(s) if s.is_finite() && s > 0.0 => Ok(Some(Duration::from_secs_f64(s))),
        Some(s) => Err(ConfigError::Invalid(format!("{what} must be positive, got {s}"))),
    }
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(Self, PathBuf), ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::from_toml(&text)?, dir))
    }

    pub fn profile(&self) -> ConstraintProfile {
        self.regime.profile()
    }

    pub fn bench_options(&self) -> BenchOptions {
        BenchOptions { jobs: self.jobs, train_size: self.train_size }
    }

    /// Builds the method; relative paths resolve against `base_dir`.
    pub fn method(&self, base_dir: &Path) -> Result<Method, ConfigError> {
        let m = &self.method;
        let rule = match m.scorer {
            ScorerKind::Utilization => ScoringRule::Utilization,
            ScorerKind::Constant => ScoringRule::Constant(m.constant),
            ScorerKind::Program => {
                let rel = m.program.as_ref().ok_or_else(|| ConfigError::Invalid("scorer = \"program\" needs `program`".into()))?;
                let path = base_dir.join(rel);
                let text = std::fs::read_to_string(&path)
                    .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
                let p = ScoreProgram::parse(text.trim())
                    .map_err(|diag| ConfigError::Program { path: path.display().to_string(), diag })?;
                ScoringRule::Program(p)
            }
        };
        if !(0.0..=1.0).contains(&m.beta) {
            return Err(ConfigError::Invalid(format!("beta must lie in [0, 1], got {}", m.beta)));
        }
        let run_limit = secs(m.run_time_limit_secs, "run_time_limit_secs")?;
        Ok(match m.kind {
            MethodKind::FirstFit => Method::FirstFit,
            MethodKind::Greedy => Method::Greedy { rule, beta: m.beta, time_limit: run_limit },
            MethodKind::PoolSp => {
                let schedule = m.schedule.clone().unwrap_or_else(|| DEFAULT_SCHEDULE.to_vec());
                if schedule.is_empty() || schedule.iter().any(|&(b, _)| !(0.0..=1.0).contains(&b)) {
                    return Err(ConfigError::Invalid("schedule needs at least one stage with beta in [0, 1]".into()));
                }
                Method::PoolSp {
                    rule,
                    pool: PoolOptions { schedule, base_seed: 0, run_time_limit: run_limit },
                    sp: SpOptions { time_limit: secs(m.sp_time_limit_secs, "sp_time_limit_secs")?, mode: m.sp_mode },
                }
            }
        })
    }
}

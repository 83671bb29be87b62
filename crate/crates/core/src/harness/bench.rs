//! Benchmark runs over instance sets.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::verify::{verify_solution, VerificationReport};
use crate::constructive::{
    first_fit_solve, greedy_solve, ConstantScorer, ConstraintProfile, Features, Scorer, SolveError, SolveOptions,
    UtilizationScorer,
};
use crate::dsl::ScoreProgram;
use crate::instance::{Instance, Solution};
use crate::setpart::{generate_pool, solve_set_partition, PoolOptions, SpError, SpOptions};

/// Scoring rule shared by the greedy and pool methods.
#[derive(Debug, Clone, PartialEq)]
pub enum ScoringRule {
    Utilization,
    Constant(f64),
    Program(ScoreProgram),
}

impl Scorer for ScoringRule {
    fn score(&self, f: &Features) -> f64 {
        match self {
            ScoringRule::Utilization => UtilizationScorer.score(f),
            ScoringRule::Constant(c) => ConstantScorer(*c).score(f),
            ScoringRule::Program(p) => p.score(f),
        }
    }

    fn name(&self) -> String {
        match self {
            ScoringRule::Utilization => "utilization".into(),
            ScoringRule::Constant(c) => format!("constant({c})"),
            ScoringRule::Program(p) => p.serialize(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    FirstFit,
    Greedy { rule: ScoringRule, beta: f64, time_limit: Option<Duration> },
    PoolSp { rule: ScoringRule, pool: PoolOptions, sp: SpOptions },
}

impl Method {
    pub fn name(&self) -> String {
        match self {
            Method::FirstFit => "first-fit".into(),
            Method::Greedy { rule, beta, .. } => format!("greedy[{}; beta={beta}]", rule.name()),
            Method::PoolSp { rule, pool, .. } => {
                let runs: usize = pool.schedule.iter().map(|s| s.1).sum();
                format!("pool-sp[{}; {runs} runs]", rule.name())
            }
        }
    }

    /// Whether different seeds can change the outcome.
    pub fn is_seeded(&self) -> bool {
        match self {
            Method::FirstFit => false,
            Method::Greedy { beta, .. } => *beta > 0.0,
            Method::PoolSp { pool, .. } => pool.schedule.iter().any(|&(b, n)| b > 0.0 && n > 0),
        }
    }

    /// One solve, not yet verified.
    pub fn solve(&self, inst: &Instance, profile: ConstraintProfile, seed: u64) -> Result<Solution, BenchError> {
        match self {
            Method::FirstFit => Ok(first_fit_solve(inst, profile)),
            Method::Greedy { rule, beta, time_limit } => {
                let mut opts = SolveOptions::randomized(*beta, seed);
                if let Some(limit) = time_limit {
                    opts = opts.with_time_limit(*limit);
                }
                greedy_solve(inst, rule, profile, opts).map_err(|e| BenchError::Solve(inst.name.clone(), e))
            }
            Method::PoolSp { rule, pool, sp } => {
                let po = PoolOptions { base_seed: seed, ..pool.clone() };
                let p = generate_pool(inst, rule, profile, &po).map_err(|e| BenchError::Sp(inst.name.clone(), e))?;
                let s = solve_set_partition(&p, &inst.demands(), *sp).map_err(|e| BenchError::Sp(inst.name.clone(), e))?;
                Ok(s.trimmed)
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{0}: {1}")]
    Solve(String, SolveError),
    #[error("{0}: {1}")]
    Sp(String, SpError),
    #[error("{instance} (seed {seed}) failed verification: {report}")]
    Verification { instance: String, seed: u64, report: VerificationReport },
    #[error("no seeds given")]
    NoSeeds,
    #[error("cannot build a worker pool: {0}")]
    Workers(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceResult {
    pub name: String,
    pub split: Split,
    /// One entry per seed.
    pub containers: Vec<usize>,
    pub seconds: Vec<f64>,
}

/// Sample mean and standard deviation (n − 1 denominator; 0 for one sample).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Stat {
        if xs.is_empty() {
            return Stat { mean: 0.0, std: 0.0 };
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() < 2 { 0.0 } else { (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() };
        Stat { mean, std }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Totals {
    pub train: usize,
    pub test: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkResult {
    pub method: String,
    pub profile: ConstraintProfile,
    pub seeds: Vec<u64>,
    pub instances: Vec<InstanceResult>,
    /// Totals per seed.
    pub per_seed: Vec<Totals>,
    pub train: Stat,
    pub test: Stat,
    pub total: Stat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    /// Worker threads; 0 means one per logical core.
    pub jobs: usize,
    /// Leading instances counted as training.
    pub train_size: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { jobs: 0, train_size: crate::instance::TRAIN_SIZE }
    }
}

/// Solves and verifies every instance under every seed. Unseeded methods
/// run once with the first seed. Any verifier failure aborts with its report.
pub fn run_benchmark(
    instances: &[Instance],
    method: &Method,
    profile: ConstraintProfile,
    seeds: &[u64],
    opts: BenchOptions,
) -> Result<BenchmarkResult, BenchError> {
    let Some(&first) = seeds.first() else { return Err(BenchError::NoSeeds) };
    let seeds: Vec<u64> = if method.is_seeded() { seeds.to_vec() } else { vec![first] };
    let workers = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| BenchError::Workers(e.to_string()))?;
    let jobs: Vec<(usize, u64)> = (0..instances.len()).flat_map(|i| seeds.iter().map(move |&s| (i, s))).collect();
    let outcomes: Vec<Result<(usize, f64), BenchError>> = workers.install(|| {
        jobs.par_iter()
            .map(|&(i, seed)| {
                let inst = &instances[i];
                let start = Instant::now();
                let sol = method.solve(inst, profile, seed)?;
                let secs = start.elapsed().as_secs_f64();
                let report = verify_solution(inst, &sol, profile);
                if !report.ok {
                    return Err(BenchError::Verification { instance: inst.name.clone(), seed, report });
                }
                Ok((sol.containers_used, secs))
            })
            .collect()
    });
    let mut outcomes = outcomes.into_iter();
    let mut results = Vec::with_capacity(instances.len());
    for (i, inst) in instances.iter().enumerate() {
        let mut r = InstanceResult {
            name: inst.name.clone(),
            split: if i < opts.train_size { Split::Train } else { Split::Test },
            containers: Vec::new(),
            seconds: Vec::new(),
        };
        for _ in &seeds {
            let (c, s) = outcomes.next().expect("one outcome per job")?;
            r.containers.push(c);
            r.seconds.push(s);
        }
        results.push(r);
    }
    let per_seed: Vec<Totals> = (0..seeds.len())
        .map(|k| {
            let sum = |split| results.iter().filter(|r| r.split == split).map(|r| r.containers[k]).sum::<usize>();
            let (train, test) = (sum(Split::Train), sum(Split::Test));
            Totals { train, test, total: train + test }
        })
        .collect();
    let stat = |f: fn(&Totals) -> usize| Stat::of(&per_seed.iter().map(|t| f(t) as f64).collect::<Vec<_>>());
    Ok(BenchmarkResult {
        method: method.name(),
        profile,
        seeds,
        train: stat(|t| t.train),
        test: stat(|t| t.test),
        total: stat(|t| t.total),
        instances: results,
        per_seed,
    })
}

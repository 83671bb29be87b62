use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use stowage_core::constructive::{first_fit_solve, greedy_solve, ConstraintProfile, Regime, SolveOptions};
use stowage_core::dsl::ScoreProgram;
use stowage_core::harness::{
    compare_to_reference, results_csv, run_benchmark, summary_table, verify_solution, BenchConfig, BenchError,
    BenchOptions, BenchmarkResult, Comparison, Method, PerInstanceReference, ReferenceTable, ScoringRule,
};
use stowage_core::instance::{
    load_dataset, load_instance, read_solution, solution_to_string, synth_instance, write_instance, write_solution,
    Instance,
};
use stowage_core::setpart::{export_lp, generate_pool, solve_set_partition, Pool, PoolOptions, SpOptions};
use stowage_evolve::output::write_outcome;
use stowage_evolve::{
    Engine, EvolutionConfig, EvolveError, FaultModel, Generator, MockGenerator, RemoteConfig, RemoteGenerator,
    SelfCorrector, Selection, TrainingEvaluator,
};
use thiserror::Error;

use crate::args::*;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or unreadable inputs; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// A run that did not produce a verified result; exit code 1.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn failed(e: impl ToString) -> CliError {
    CliError::Failed(e.to_string())
}

fn profile(p: &ProfileArgs) -> Result<ConstraintProfile> {
    let base = Regime::from(p.regime).profile();
    if base.stability.is_none() {
        return Ok(base);
    }
    ConstraintProfile::new(Some(p.alpha), base.separation).map_err(usage)
}

fn rule(s: &ScorerArgs) -> Result<ScoringRule> {
    Ok(match s.scorer.as_str() {
        "utilization" | "appendix-f" => ScoringRule::Utilization,
        "constant" => ScoringRule::Constant(s.constant),
        path => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
            ScoringRule::Program(ScoreProgram::parse(text.trim()).map_err(|d| usage(format!("{path}: {d}")))?)
        }
    })
}

fn beta(b: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&b) {
        Ok(b)
    } else {
        Err(usage(format!("beta must lie in [0, 1], got {b}")))
    }
}

fn seconds(v: Option<f64>, flag: &str) -> Result<Option<Duration>> {
    match v {
        None => Ok(None),
        Some(s) if s.is_finite() && s > 0.0 => Ok(Some(Duration::from_secs_f64(s))),
        Some(s) => Err(usage(format!("--{flag} must be positive, got {s}"))),
    }
}

pub fn parse_schedule(text: &str) -> Result<Vec<(f64, usize)>> {
    let stages = text
        .split(',')
        .map(|stage| {
            let (b, n) = stage.trim().split_once(':').ok_or_else(|| usage(format!("schedule stage `{stage}` is not beta:runs")))?;
            let b: f64 = b.trim().parse().map_err(|_| usage(format!("bad beta `{b}` in schedule")))?;
            let n: usize = n.trim().parse().map_err(|_| usage(format!("bad run count `{n}` in schedule")))?;
            Ok((beta(b)?, n))
        })
        .collect::<Result<Vec<_>>>()?;
    if stages.iter().all(|s| s.1 == 0) {
        return Err(usage("schedule has no runs"));
    }
    Ok(stages)
}

fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    text.split(',').map(|s| s.trim().parse().map_err(|_| usage(format!("bad seed `{s}`")))).collect()
}

fn workers(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(failed)
}

fn instance(path: &Path) -> Result<Instance> {
    load_instance(path).map_err(usage)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(failed)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| failed(format!("{}: {e}", path.display())))
}

fn verdict(inst: &Instance, sol: &stowage_core::instance::Solution, profile: ConstraintProfile) -> Result<()> {
    let report = verify_solution(inst, sol, profile);
    if report.ok {
        eprintln!("{}: {} containers, verification ok", inst.name, sol.containers_used);
        Ok(())
    } else {
        Err(failed(format!("{}: verification failed: {report}", inst.name)))
    }
}

pub fn solve(a: SolveArgs) -> Result<()> {
    let inst = instance(&a.instance)?;
    let profile = profile(&a.profile)?;
    let sol = match a.method {
        SolverArg::FirstFit => first_fit_solve(&inst, profile),
        SolverArg::Greedy => {
            let rule = rule(&a.scorer)?;
            let mut opts = SolveOptions::randomized(beta(a.beta)?, a.seed);
            if let Some(limit) = seconds(a.time_limit, "time-limit")? {
                opts = opts.with_time_limit(limit);
            }
            greedy_solve(&inst, &rule, profile, opts).map_err(failed)?
        }
    };
    match &a.out {
        Some(path) => write_solution(&sol, path).map_err(failed)?,
        None => io::stdout().write_all(solution_to_string(&sol).as_bytes()).map_err(failed)?,
    }
    verdict(&inst, &sol, profile)
}

pub fn verify(a: VerifyArgs) -> Result<()> {
    let inst = instance(&a.instance)?;
    let sol = read_solution(&a.solution).map_err(usage)?;
    let report = verify_solution(&inst, &sol, profile(&a.profile)?);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(failed)?);
    } else {
        println!("{report}");
    }
    if report.ok {
        Ok(())
    } else {
        Err(failed(format!("{} violation(s)", report.violations.len())))
    }
}

pub fn pool(a: PoolArgs, jobs: usize) -> Result<()> {
    let inst = instance(&a.instance)?;
    let profile = profile(&a.profile)?;
    let rule = rule(&a.scorer)?;
    let opts = PoolOptions {
        schedule: parse_schedule(&a.schedule)?,
        base_seed: a.seed,
        run_time_limit: seconds(a.run_time_limit, "run-time-limit")?,
    };
    let pool = workers(jobs)?.install(|| generate_pool(&inst, &rule, profile, &opts)).map_err(failed)?;
    pool.write(&a.out).map_err(failed)?;
    let best = pool.best_run();
    eprintln!(
        "{}: {} patterns from {} runs, best run {}",
        inst.name,
        pool.patterns.len(),
        pool.runs.len(),
        best.map_or("none".to_string(), |c| format!("{c} containers"))
    );
    Ok(())
}

pub fn sp(a: SpArgs) -> Result<()> {
    let pool = Pool::read(&a.pool).map_err(usage)?;
    let opts = SpOptions { time_limit: seconds(a.time_limit, "time-limit")?, mode: a.mode.into() };
    let sol = solve_set_partition(&pool, &pool.instance.demands(), opts).map_err(failed)?;
    write_solution(&sol.trimmed, &a.out).map_err(failed)?;
    if let Some(path) = &a.selection_out {
        write_json(path, &sol)?;
    }
    if !sol.optimal {
        eprintln!("time limit reached; the selection may not be optimal");
    }
    verdict(&pool.instance, &sol.trimmed, pool.profile)
}

pub fn export(a: ExportLpArgs) -> Result<()> {
    let pool = Pool::read(&a.pool).map_err(usage)?;
    export_lp(&pool, &pool.instance.demands(), a.mode.into(), &a.out).map_err(failed)
}

pub fn synth(a: SynthArgs) -> Result<()> {
    fs::create_dir_all(&a.out).map_err(|e| failed(format!("{}: {e}", a.out.display())))?;
    for seed in a.seed..a.seed.saturating_add(a.count) {
        let inst = synth_instance(seed, a.profile.into());
        write_instance(&inst, a.out.join(format!("{}.json", inst.name))).map_err(failed)?;
    }
    Ok(())
}

pub fn evolve(a: EvolveArgs, jobs: usize) -> Result<()> {
    let train: Vec<Instance> = match (&a.dataset, a.synthetic) {
        (Some(dir), _) => {
            let mut all = load_dataset(dir).map_err(usage)?;
            if all.len() < a.train_size {
                return Err(usage(format!("{} holds {} instances, fewer than --train-size {}", dir.display(), all.len(), a.train_size)));
            }
            all.truncate(a.train_size);
            all
        }
        (None, Some(n)) => (0..n as u64).map(|s| synth_instance(s, a.synthetic_profile.into())).collect(),
        (None, None) => return Err(usage("evolve needs --dataset or --synthetic")),
    };
    if !(0.0..=1.0).contains(&a.fault_rate) {
        return Err(usage(format!("--fault-rate must lie in [0, 1], got {}", a.fault_rate)));
    }
    let budget = seconds(Some(a.budget), "budget")?.expect("given");
    let evaluator = TrainingEvaluator::new(train, profile(&a.profile)?, budget).with_jobs(jobs).map_err(failed)?;
    let mut generator: Box<dyn Generator> = match a.generator {
        GeneratorArg::Mock => {
            let faults = if a.fault_rate > 0.0 { FaultModel::Random { rate: a.fault_rate } } else { FaultModel::None };
            Box::new(MockGenerator::new(a.seed, faults))
        }
        GeneratorArg::Remote => {
            let mut g = RemoteGenerator::new(RemoteConfig::from_env().map_err(usage)?).map_err(usage)?;
            if let Some(path) = &a.journal {
                g = g.with_journal(path).map_err(failed)?;
            }
            Box::new(g)
        }
    };
    let cfg = EvolutionConfig {
        population_size: a.population,
        init_size: a.init_size.unwrap_or(a.population),
        generations: a.generations,
        corrector: SelfCorrector::new(a.max_corrections).map_err(usage)?,
        selection: Selection::RankWeighted,
        reject_duplicates: !a.allow_duplicates,
        seed: a.seed,
    };
    let out = Engine::new(cfg, generator.as_mut(), &evaluator).run().map_err(|e| match e {
        EvolveError::EmptyPopulation | EvolveError::CorrectionCap(_) => usage(e),
        _ => failed(e),
    })?;
    write_outcome(&a.out, &out).map_err(|e| failed(format!("{}: {e}", a.out.display())))?;
    print!("{}", out.robustness);
    let best = out.best();
    println!(
        "best fitness {:.4}: {}",
        best.fitness.expect("valid"),
        best.program.as_ref().expect("valid").serialize()
    );
    Ok(())
}

#[derive(Serialize)]
struct BenchReport<'a> {
    result: &'a BenchmarkResult,
    comparison: Option<&'a Comparison>,
}

pub fn bench(a: BenchArgs, jobs: usize) -> Result<()> {
    let (method, profile, regime, seeds, opts, dataset) = match &a.config {
        Some(path) => {
            let (cfg, dir) = BenchConfig::load(path).map_err(usage)?;
            let dataset = a
                .dataset
                .clone()
                .or_else(|| cfg.dataset.as_ref().map(|d| dir.join(d)))
                .ok_or_else(|| usage("no dataset in the config or on the command line"))?;
            let opts = BenchOptions { jobs: if jobs > 0 { jobs } else { cfg.jobs }, ..cfg.bench_options() };
            (cfg.method(&dir).map_err(usage)?, cfg.profile(), cfg.regime, cfg.seeds.clone(), opts, dataset)
        }
        None => {
            let dataset: PathBuf = a.dataset.clone().ok_or_else(|| usage("bench needs --dataset or --config"))?;
            let kind = a.method.ok_or_else(|| usage("bench needs --method or --config"))?;
            let method = match kind {
                MethodArg::FirstFit => Method::FirstFit,
                MethodArg::Greedy => Method::Greedy {
                    rule: rule(&a.scorer)?,
                    beta: beta(a.beta)?,
                    time_limit: seconds(a.run_time_limit, "run-time-limit")?,
                },
                MethodArg::PoolSp => Method::PoolSp {
                    rule: rule(&a.scorer)?,
                    pool: PoolOptions {
                        schedule: parse_schedule(&a.schedule)?,
                        base_seed: 0,
                        run_time_limit: seconds(a.run_time_limit, "run-time-limit")?,
                    },
                    sp: SpOptions { time_limit: seconds(a.sp_time_limit, "sp-time-limit")?, mode: a.mode.into() },
                },
            };
            let opts = BenchOptions { jobs, train_size: a.train_size };
            (method, profile(&a.profile)?, a.profile.regime.into(), parse_seeds(&a.seeds)?, opts, dataset)
        }
    };
    let instances = load_dataset(&dataset).map_err(usage)?;
    let table = match &a.reference {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            ReferenceTable::from_toml(&text).map_err(usage)?
        }
        None => ReferenceTable::bundled(),
    };
    let per_instance = match &a.per_instance {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Some(PerInstanceReference::from_csv(&text).map_err(usage)?)
        }
        None => None,
    };
    let result = run_benchmark(&instances, &method, profile, &seeds, opts).map_err(|e| match e {
        BenchError::NoSeeds => usage(e),
        _ => failed(e),
    })?;
    let comparison = match compare_to_reference(&result, &table, regime, a.tolerance, per_instance.as_ref()) {
        Ok(c) => Some(c),
        Err(e) => {
            eprintln!("no reference comparison: {e}");
            None
        }
    };
    print!("{}", summary_table(&result, comparison.as_ref()));
    if let Some(p) = &a.csv {
        fs::write(p, results_csv(&result)).map_err(|e| failed(format!("{}: {e}", p.display())))?;
    }
    if let Some(p) = &a.json {
        write_json(p, &BenchReport { result: &result, comparison: comparison.as_ref() })?;
    }
    Ok(())
}

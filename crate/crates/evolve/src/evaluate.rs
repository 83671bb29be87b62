//! Fitness of a candidate: mean containers over the training instances.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use stowage_core::constructive::{greedy_solve, ConstraintProfile, SolveError, SolveOptions};
use stowage_core::dsl::ScoreProgram;
use stowage_core::harness::verify_solution;
use stowage_core::instance::Instance;

use crate::candidate::{Diagnostic, DiagnosticKind};

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub program: ScoreProgram,
    pub fitness: f64,
}

pub trait Evaluator: Sync {
    /// Parses and scores `source`; failures come back as diagnostics.
    fn evaluate(&self, source: &str) -> Result<Evaluation, Diagnostic>;
}

/// Deterministic greedy solves of every training instance under one shared
/// wall-clock budget, each verified independently.
pub struct TrainingEvaluator {
    instances: Vec<Instance>,
    profile: ConstraintProfile,
    budget: Duration,
    workers: Option<Arc<rayon::ThreadPool>>,
}

impl TrainingEvaluator {
    pub fn new(instances: Vec<Instance>, profile: ConstraintProfile, budget: Duration) -> Self {
        Self { instances, profile, budget, workers: None }
    }

    /// Solves instances on `jobs` threads; 0 means one per logical core.
    pub fn with_jobs(mut self, jobs: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        self.workers = Some(Arc::new(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?));
        Ok(self)
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    fn solve_all(&self, program: &ScoreProgram, deadline: Instant) -> Vec<Result<usize, Diagnostic>> {
        let run = || {
            self.instances
                .par_iter()
                .map(|inst| {
                    let opts = SolveOptions { deadline: Some(deadline), ..SolveOptions::default() };
                    match greedy_solve(inst, program, self.profile, opts) {
                        Ok(sol) => {
                            let report = verify_solution(inst, &sol, self.profile);
                            if report.ok {
                                Ok(sol.containers_used)
                            } else {
                                Err(Diagnostic::new(DiagnosticKind::ConstraintViolation, format!("{}: {report}", inst.name)))
                            }
                        }
                        Err(SolveError::Timeout { .. }) => Err(Diagnostic::new(DiagnosticKind::Timeout, inst.name.clone())),
                        Err(e) => Err(Diagnostic::new(DiagnosticKind::ConstraintViolation, format!("{}: {e}", inst.name))),
                    }
                })
                .collect()
        };
        match &self.workers {
            Some(pool) => pool.install(run),
            None => run(),
        }
    }
}

impl Evaluator for TrainingEvaluator {
    fn evaluate(&self, source: &str) -> Result<Evaluation, Diagnostic> {
        let program = ScoreProgram::parse(source.trim())
            .map_err(|d| Diagnostic::new(DiagnosticKind::SyntaxError, d.to_string()))?;
        let deadline = Instant::now() + self.budget;
        let outcomes = self.solve_all(&program, deadline);
        // Violations outrank timeouts: they are what the generator must fix.
        if let Some(Err(d)) = outcomes.iter().find(|o| matches!(o, Err(d) if d.kind == DiagnosticKind::ConstraintViolation)) {
            return Err(d.clone());
        }
        let solved = outcomes.iter().filter(|o| o.is_ok()).count();
        if solved < outcomes.len() {
            return Err(Diagnostic::new(
                DiagnosticKind::Timeout,
                format!(
                    "evaluation budget of {:.3} s exhausted with {solved} of {} training instances solved",
                    self.budget.as_secs_f64(),
                    outcomes.len()
                ),
            ));
        }
        let total: usize = outcomes.into_iter().map(|o| o.expect("all solved")).sum();
        let fitness = if self.instances.is_empty() { 0.0 } else { total as f64 / self.instances.len() as f64 };
        Ok(Evaluation { program, fitness })
    }
}

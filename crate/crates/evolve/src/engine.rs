//! The evolution loop: seeding, self-correction, generations and records.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::candidate::{Candidate, Diagnostic, Lineage, Operator, Outcome, Status, MAX_CORRECTIONS};
use crate::evaluate::Evaluator;
use crate::generator::{Generator, GeneratorError, GeneratorRequest, Parent};
use crate::population::{Population, Selection};

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("population size must be at least 1")]
    EmptyPopulation,
    #[error("correction cap is {MAX_CORRECTIONS}, got {0}")]
    CorrectionCap(u8),
    #[error("no valid candidate among {0} initial requests")]
    NoValidCandidate(usize),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
}

/// Repairs failed candidates by sending their diagnostics back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelfCorrector {
    max_attempts: u8,
}

impl Default for SelfCorrector {
    fn default() -> Self {
        Self { max_attempts: MAX_CORRECTIONS }
    }
}

impl SelfCorrector {
    pub fn new(max_attempts: u8) -> Result<Self, EvolveError> {
        if max_attempts > MAX_CORRECTIONS {
            return Err(EvolveError::CorrectionCap(max_attempts));
        }
        Ok(Self { max_attempts })
    }

    pub fn max_attempts(self) -> u8 {
        self.max_attempts
    }
}

fn apply(c: &mut Candidate, result: Result<crate::evaluate::Evaluation, Diagnostic>) {
    match result {
        Ok(e) => {
            c.program = Some(e.program);
            c.fitness = Some(e.fitness);
            c.diagnostic = None;
        }
        Err(d) => {
            c.program = None;
            c.fitness = None;
            c.diagnostic = Some(d);
        }
    }
    c.status = Status::from_diagnostic(c.diagnostic.as_ref());
    c.history.push(c.status);
}

/// First evaluation of a fresh candidate.
pub fn evaluate_candidate(c: &mut Candidate, evaluator: &dyn Evaluator) {
    let result = evaluator.evaluate(&c.source);
    apply(c, result);
}

/// Corrects `c` until it is valid or the attempt cap is reached. Valid
/// candidates come back unchanged.
pub fn self_correct(
    mut c: Candidate,
    generator: &mut dyn Generator,
    evaluator: &dyn Evaluator,
    corrector: SelfCorrector,
) -> Result<Candidate, GeneratorError> {
    while !c.is_valid() && c.correction_attempts < corrector.max_attempts {
        let Some(d) = c.diagnostic.clone() else { break };
        let req = GeneratorRequest::correction(Parent { thought: c.thought.clone(), source: c.source.clone() }, d);
        let reply = generator.generate(&req)?;
        c.thought = reply.thought;
        c.source = reply.source;
        c.correction_attempts += 1;
        let result = evaluator.evaluate(&c.source);
        apply(&mut c, result);
    }
    c.assert_invariants();
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RobustnessRow {
    /// Corrections applied so far; 0 is the initial generation.
    pub iteration: u8,
    pub valid: usize,
    pub timeout: usize,
    pub code_error: usize,
}

/// Cumulative outcome counts of the initial candidates after each
/// correction round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RobustnessReport {
    pub candidates: usize,
    pub rows: Vec<RobustnessRow>,
}

impl RobustnessReport {
    pub fn from_candidates(cands: &[Candidate], rounds: u8) -> Self {
        let rows = (0..=rounds)
            .map(|k| {
                let mut row = RobustnessRow { iteration: k, valid: 0, timeout: 0, code_error: 0 };
                for c in cands {
                    match c.status_after(k as usize).outcome() {
                        Some(Outcome::Valid) => row.valid += 1,
                        Some(Outcome::Timeout) => row.timeout += 1,
                        Some(Outcome::CodeError) | None => row.code_error += 1,
                    }
                }
                row
            })
            .collect();
        Self { candidates: cands.len(), rows }
    }
}

impl fmt::Display for RobustnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<22} {:>6} {:>8} {:>11}", "stage", "valid", "timeout", "code error")?;
        for r in &self.rows {
            let stage = if r.iteration == 0 { "initial generation".to_string() } else { format!("+ correction {}", r.iteration) };
            writeln!(f, "{stage:<22} {:>6} {:>8} {:>11}", r.valid, r.timeout, r.code_error)?;
        }
        Ok(())
    }
}

/// One generator request and what became of its candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub generation: u32,
    pub operator: Operator,
    pub parents: Vec<u64>,
    pub candidate: u64,
    pub thought: String,
    pub source: String,
    pub status: Status,
    pub fitness: Option<f64>,
    pub correction_attempts: u8,
    pub history: Vec<Status>,
    pub diagnostic: Option<Diagnostic>,
    pub admitted: bool,
}

/// Best and mean fitness of the population after each generation;
/// generation 0 is the initial population.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub generation: u32,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub population: usize,
    pub best_program: String,
}

impl TrajectoryPoint {
    fn of(pop: &Population) -> Self {
        let best = pop.best().expect("population is non-empty");
        Self {
            generation: pop.generation,
            best_fitness: best.fitness.expect("valid"),
            mean_fitness: pop.mean_fitness().expect("non-empty"),
            population: pop.len(),
            best_program: best.program.as_ref().expect("valid").serialize(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub population_size: usize,
    /// Candidates requested to seed the population.
    pub init_size: usize,
    pub generations: u32,
    pub corrector: SelfCorrector,
    pub selection: Selection,
    /// Refuse children whose program already sits in the population.
    pub reject_duplicates: bool,
    /// Seeds parent selection.
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            population_size: 5,
            init_size: 5,
            generations: 10,
            corrector: SelfCorrector::default(),
            selection: Selection::RankWeighted,
            reject_duplicates: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionOutcome {
    pub population: Population,
    pub robustness: RobustnessReport,
    pub trajectory: Vec<TrajectoryPoint>,
    pub records: Vec<Record>,
}

impl EvolutionOutcome {
    pub fn best(&self) -> &Candidate {
        self.population.best().expect("runs keep a non-empty population")
    }
}

pub struct Engine<'a> {
    cfg: EvolutionConfig,
    generator: &'a mut dyn Generator,
    evaluator: &'a dyn Evaluator,
    rng: ChaCha8Rng,
    next_id: u64,
    records: Vec<Record>,
}

impl<'a> Engine<'a> {
    pub fn new(cfg: EvolutionConfig, generator: &'a mut dyn Generator, evaluator: &'a dyn Evaluator) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Self { cfg, generator, evaluator, rng, next_id: 0, records: Vec::new() }
    }

    /// Records so far, including those of an aborted generation's
    /// completed requests.
    pub fn records(&self) -> &[Record] {
        &self.records
    }

    fn fresh(&mut self, op: Operator, parents: &[&Candidate]) -> Result<Candidate, GeneratorError> {
        let req = GeneratorRequest::operator(
            op,
            parents.iter().map(|p| Parent { thought: p.thought.clone(), source: p.source.clone() }).collect(),
        )?;
        let reply = self.generator.generate(&req)?;
        let id = self.next_id;
        self.next_id += 1;
        let lineage = Lineage { operator: op, parents: parents.iter().map(|p| p.id).collect() };
        let mut c = Candidate::untested(id, reply.thought, reply.source, lineage);
        evaluate_candidate(&mut c, self.evaluator);
        self_correct(c, self.generator, self.evaluator, self.cfg.corrector)
    }

    fn record(&mut self, generation: u32, c: &Candidate, pop: &Population) {
        self.records.push(Record {
            generation,
            operator: c.lineage.operator,
            parents: c.lineage.parents.clone(),
            candidate: c.id,
            thought: c.thought.clone(),
            source: c.source.clone(),
            status: c.status,
            fitness: c.fitness,
            correction_attempts: c.correction_attempts,
            history: c.history.clone(),
            diagnostic: c.diagnostic.clone(),
            admitted: pop.members().iter().any(|m| m.id == c.id),
        });
    }

    /// Requests `size` parentless E1 candidates, corrects failures and
    /// admits the valid ones.
    pub fn init_population(&mut self, size: usize) -> Result<(Population, RobustnessReport), EvolveError> {
        if size == 0 {
            return Err(EvolveError::EmptyPopulation);
        }
        let mut pop = Population::new(self.cfg.population_size).ok_or(EvolveError::EmptyPopulation)?;
        let mut cands = Vec::with_capacity(size);
        for _ in 0..size {
            cands.push(self.fresh(Operator::E1, &[])?);
        }
        let report = RobustnessReport::from_candidates(&cands, self.cfg.corrector.max_attempts);
        let mut admitted: Vec<Candidate> = Vec::new();
        for c in &cands {
            let dup = self.cfg.reject_duplicates
                && c.program.is_some()
                && admitted.iter().any(|a| a.program == c.program);
            if c.is_valid() && !dup {
                admitted.push(c.clone());
            }
        }
        pop.admit(admitted);
        for c in &cands {
            self.record(0, c, &pop);
        }
        if pop.is_empty() {
            return Err(EvolveError::NoValidCandidate(size));
        }
        Ok((pop, report))
    }

    /// One request per operator, then elitist truncation. On a generator
    /// failure the input population is left as it was.
    pub fn step_generation(&mut self, pop: &Population) -> Result<Population, EvolveError> {
        assert!(!pop.is_empty(), "step_generation needs a non-empty population");
        let generation = pop.generation + 1;
        let mut children = Vec::new();
        for op in Operator::ALL {
            let k = match op {
                Operator::E1 | Operator::E2 => 2,
                Operator::M1 | Operator::M2 | Operator::M3 => 1,
            };
            let mut rng = self.rng.clone();
            let parents: Vec<Candidate> =
                pop.select_parents(k, self.cfg.selection, &mut rng).into_iter().cloned().collect();
            self.rng = rng;
            let refs: Vec<&Candidate> = parents.iter().collect();
            children.push(self.fresh(op, &refs)?);
        }
        let mut next = pop.clone();
        let mut admissible = Vec::new();
        for c in &children {
            let dup = self.cfg.reject_duplicates
                && (next.contains_program(c) || admissible.iter().any(|a: &Candidate| a.program == c.program));
            if c.is_valid() && !dup {
                admissible.push(c.clone());
            }
        }
        next.admit(admissible);
        next.generation = generation;
        for c in &children {
            self.record(generation, c, &next);
        }
        Ok(next)
    }

    /// Seeds, then evolves for the configured number of generations.
    pub fn run(&mut self) -> Result<EvolutionOutcome, EvolveError> {
        let (mut pop, robustness) = self.init_population(self.cfg.init_size)?;
        let mut trajectory = vec![TrajectoryPoint::of(&pop)];
        for _ in 0..self.cfg.generations {
            pop = self.step_generation(&pop)?;
            trajectory.push(TrajectoryPoint::of(&pop));
        }
        Ok(EvolutionOutcome { population: pop, robustness, trajectory, records: self.records.clone() })
    }
}

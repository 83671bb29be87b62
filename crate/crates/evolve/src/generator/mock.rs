//! Offline generator: operators become DSL mutations, with optional injected
//! syntax faults that later corrections can repair.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stowage_core::constructive::Feature;
use stowage_core::dsl::{mutate, random_program, Expr, MutationOp, ScoreProgram};

use super::{Generator, GeneratorError, GeneratorRequest, Reply, RequestKind};
use crate::candidate::Operator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaultModel {
    None,
    /// Each fresh reply is broken with probability `rate`; each correction
    /// repairs with probability `1 - rate`.
    Random { rate: f64 },
    /// Fresh replies are broken; the n-th correction of each repairs it.
    FixOnAttempt(u8),
    /// Every reply is broken.
    Unfixable,
}

/// The valid program a broken source stands for, and how many corrections
/// it has had.
#[derive(Debug, Clone)]
struct Fault {
    intended: ScoreProgram,
    corrections: u8,
}

#[derive(Debug)]
pub struct MockGenerator {
    rng: ChaCha8Rng,
    faults: FaultModel,
    seeds: Vec<ScoreProgram>,
    broken: HashMap<String, Fault>,
    requests: Vec<GeneratorRequest>,
}

/// The utilization rule, offered as the first initial candidate.
pub const UTILIZATION_SOURCE: &str = "0.9*vol_util + 0.05*quantity + 0.05*adjacency";

impl MockGenerator {
    pub fn new(seed: u64, faults: FaultModel) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            faults,
            seeds: vec![ScoreProgram::parse(UTILIZATION_SOURCE).expect("valid")],
            broken: HashMap::new(),
            requests: Vec::new(),
        }
    }

    /// Initial requests return these programs, in order, before random ones.
    pub fn with_seeds(mut self, seeds: Vec<ScoreProgram>) -> Self {
        self.seeds = seeds;
        self
    }

    /// Every request received so far.
    pub fn requests(&self) -> &[GeneratorRequest] {
        &self.requests
    }

    fn program(&self, source: &str) -> Option<ScoreProgram> {
        ScoreProgram::parse(source).ok().or_else(|| self.broken.get(source).map(|f| f.intended.clone()))
    }

    fn fresh(&mut self, op: Operator, req: &GeneratorRequest) -> ScoreProgram {
        let parents: Vec<ScoreProgram> = req.parents.iter().filter_map(|p| self.program(&p.source)).collect();
        let Some(first) = parents.first() else {
            if self.seeds.is_empty() {
                return random_program(&mut self.rng);
            }
            return self.seeds.remove(0);
        };
        let mutation = match op {
            Operator::E1 => MutationOp::Diversify,
            Operator::E2 => MutationOp::Synthesize,
            Operator::M1 => MutationOp::Improve,
            Operator::M2 => MutationOp::Tune,
            Operator::M3 => MutationOp::Simplify,
        };
        let other = parents.get(1).unwrap_or(first);
        mutate(first, mutation, Some(other), &mut self.rng)
    }

    /// A source that fails to parse, distinct per call.
    fn corrupt(&mut self, p: &ScoreProgram) -> String {
        let s = p.serialize();
        let broken = match self.rng.gen_range(0..4) {
            0 => format!("{s} +"),
            1 => format!("({s}"),
            2 => format!("{s} * frobnicate"),
            _ => format!("{s} $"),
        };
        // Distinct broken texts keep per-candidate correction counts apart.
        let mut out = broken.clone();
        let mut k = 1;
        while self.broken.contains_key(&out) {
            out = format!("{broken}{}", " ".repeat(k));
            k += 1;
        }
        out
    }

    fn emit(&mut self, program: ScoreProgram, corrections: u8, broken: bool) -> Reply {
        let thought = describe(&program);
        if !broken {
            return Reply { thought, source: program.serialize() };
        }
        let source = self.corrupt(&program);
        self.broken.insert(source.clone(), Fault { intended: program, corrections });
        Reply { thought, source }
    }
}

fn describe(p: &ScoreProgram) -> String {
    fn walk(e: &Expr, out: &mut BTreeSet<Feature>) {
        if let Expr::Feature(f) = e {
            out.insert(*f);
        }
        for c in e.children() {
            walk(c, out);
        }
    }
    let mut used = BTreeSet::new();
    walk(p.ast(), &mut used);
    if used.is_empty() {
        return "Score every placement the same.".to_string();
    }
    let names: Vec<&str> = used.iter().map(|f| f.name()).collect();
    format!("Rank placements by {}.", names.join(", "))
}

impl Generator for MockGenerator {
    fn generate(&mut self, req: &GeneratorRequest) -> Result<Reply, GeneratorError> {
        self.requests.push(req.clone());
        match req.kind {
            RequestKind::Operator(op) => {
                let program = self.fresh(op, req);
                let broken = match self.faults {
                    FaultModel::None => false,
                    FaultModel::Random { rate } => self.rng.gen_bool(rate.clamp(0.0, 1.0)),
                    FaultModel::FixOnAttempt(_) | FaultModel::Unfixable => true,
                };
                Ok(self.emit(program, 0, broken))
            }
            RequestKind::Correction => {
                let failing = req
                    .parents
                    .first()
                    .ok_or_else(|| GeneratorError::InvalidRequest("correction without a failing candidate".into()))?;
                let (intended, done) = match self.broken.get(&failing.source) {
                    Some(f) => (f.intended.clone(), f.corrections + 1),
                    // Parses but failed for another reason: try a variant.
                    None => match ScoreProgram::parse(&failing.source) {
                        Ok(p) => (mutate(&p, MutationOp::Simplify, None, &mut self.rng), 1),
                        Err(_) => (random_program(&mut self.rng), 1),
                    },
                };
                let broken = match self.faults {
                    FaultModel::None => false,
                    FaultModel::Random { rate } => self.rng.gen_bool(rate.clamp(0.0, 1.0)),
                    FaultModel::FixOnAttempt(n) => done < n,
                    FaultModel::Unfixable => true,
                };
                Ok(self.emit(intended, done, broken))
            }
        }
    }

    fn name(&self) -> String {
        format!("mock({:?})", self.faults)
    }
}

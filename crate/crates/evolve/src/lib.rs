//! Evolutionary search over placement-scoring programs, driven by a
//! program generator with diagnostic-guided self-correction.

pub mod candidate;
pub mod engine;
pub mod evaluate;
pub mod generator;
pub mod output;
pub mod population;

pub use candidate::{Candidate, Diagnostic, DiagnosticKind, Lineage, Operator, Outcome, Status, MAX_CORRECTIONS};
pub use engine::{
    evaluate_candidate, self_correct, Engine, EvolutionConfig, EvolutionOutcome, EvolveError, Record, RobustnessReport,
    RobustnessRow, SelfCorrector, TrajectoryPoint,
};
pub use evaluate::{Evaluation, Evaluator, TrainingEvaluator};
pub use generator::{
    FaultModel, Generator, GeneratorError, GeneratorRequest, MockGenerator, Parent, RemoteConfig, RemoteGenerator, Reply,
    RequestKind, UTILIZATION_SOURCE,
};
pub use population::{Population, Selection};

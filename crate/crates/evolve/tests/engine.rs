use std::time::Duration;

use stowage_core::constructive::ConstraintProfile;
use stowage_core::instance::{synth_instance, Instance, SynthProfile};
use stowage_evolve::output::{read_best_fitness, write_outcome};
use stowage_evolve::{
    Engine, EvolutionConfig, EvolutionOutcome, Evaluator, FaultModel, MockGenerator, Outcome, RequestKind,
    TrainingEvaluator, MAX_CORRECTIONS,
};

fn training() -> Vec<Instance> {
    (0..6).map(|s| synth_instance(100 + s, SynthProfile::Small)).collect()
}

fn evaluator() -> TrainingEvaluator {
    TrainingEvaluator::new(training(), ConstraintProfile::BASE, Duration::from_secs(60))
}

fn run(seed: u64, faults: FaultModel, ev: &TrainingEvaluator) -> (EvolutionOutcome, usize) {
    let mut g = MockGenerator::new(seed, faults);
    let cfg = EvolutionConfig { seed, ..EvolutionConfig::default() };
    let out = Engine::new(cfg, &mut g, ev).run().unwrap();
    (out, g.requests().len())
}

#[test]
fn runs_are_bit_reproducible() {
    let ev = evaluator();
    let (a, _) = run(7, FaultModel::Random { rate: 0.3 }, &ev);
    let (b, _) = run(7, FaultModel::Random { rate: 0.3 }, &ev);
    assert_eq!(a, b);
    let ja = serde_json::to_string(&a.records).unwrap();
    let jb = serde_json::to_string(&b.records).unwrap();
    assert_eq!(ja, jb);
    assert_eq!(a.trajectory.len(), 11);
}

#[test]
fn best_fitness_never_gets_worse() {
    let ev = evaluator();
    for seed in 0..3 {
        let (out, requests) = run(seed, FaultModel::None, &ev);
        assert_eq!(requests, 5 + 10 * 5);
        for w in out.trajectory.windows(2) {
            assert!(w[1].best_fitness <= w[0].best_fitness, "seed {seed}: {:?}", out.trajectory);
        }
        assert!(out.population.len() <= 5);
        assert!(out.population.members().iter().all(|m| m.is_valid()));
    }
}

#[test]
fn stored_fitness_is_reproduced_on_reevaluation() {
    let ev = evaluator();
    let (out, _) = run(11, FaultModel::Random { rate: 0.2 }, &ev);
    for m in out.population.members() {
        let again = ev.evaluate(&m.source).unwrap();
        assert_eq!(Some(again.fitness), m.fitness);
    }
}

#[test]
fn correction_cap_is_respected() {
    let ev = evaluator();
    let mut g = MockGenerator::new(3, FaultModel::Random { rate: 0.6 });
    let cfg = EvolutionConfig { generations: 4, seed: 3, ..EvolutionConfig::default() };
    let out = Engine::new(cfg, &mut g, &ev).run().unwrap();
    assert!(out.records.iter().all(|r| r.correction_attempts <= MAX_CORRECTIONS));
    assert!(out.records.iter().all(|r| r.history.len() == r.correction_attempts as usize + 1));
    let corrections = g.requests().iter().filter(|r| r.kind == RequestKind::Correction).count();
    let attempts: usize = out.records.iter().map(|r| r.correction_attempts as usize).sum();
    assert_eq!(corrections, attempts);
}

#[test]
fn self_correction_lifts_the_valid_count() {
    let ev = evaluator();
    let mut g = MockGenerator::new(5, FaultModel::Random { rate: 0.3 });
    let cfg = EvolutionConfig { population_size: 20, init_size: 20, generations: 0, seed: 5, ..EvolutionConfig::default() };
    let mut engine = Engine::new(cfg, &mut g, &ev);
    let (_, report) = engine.init_population(20).unwrap();
    let valid: Vec<usize> = report.rows.iter().map(|r| r.valid).collect();
    assert_eq!(valid.len(), MAX_CORRECTIONS as usize + 1);
    assert!(valid.windows(2).all(|w| w[1] >= w[0]), "{valid:?}");
    assert!(valid.last() > valid.first(), "{valid:?}");
    for r in &report.rows {
        assert_eq!(r.valid + r.timeout + r.code_error, 20);
    }
    let text = report.to_string();
    assert!(text.contains("initial generation") && text.contains("+ correction 5"));
}

#[test]
fn timeouts_are_reported_as_such() {
    let heavy: Vec<Instance> = (0..20).map(|s| synth_instance(s, SynthProfile::Medium)).collect();
    let ev = TrainingEvaluator::new(heavy, ConstraintProfile::BASE, Duration::from_millis(1));
    let mut g = MockGenerator::new(0, FaultModel::None);
    let cfg = EvolutionConfig { corrector: stowage_evolve::SelfCorrector::new(1).unwrap(), ..EvolutionConfig::default() };
    let mut engine = Engine::new(cfg, &mut g, &ev);
    assert!(engine.init_population(2).is_err());
    let rec = &engine.records()[0];
    assert_eq!(rec.history[0].outcome(), Some(Outcome::Timeout));
    assert!(rec.diagnostic.as_ref().unwrap().detail.contains("budget"));
}

#[test]
fn artifacts_round_trip() {
    let ev = evaluator();
    let (out, _) = run(2, FaultModel::None, &ev);
    let dir = tempfile::tempdir().unwrap();
    write_outcome(dir.path(), &out).unwrap();
    let best = read_best_fitness(&dir.path().join("trajectory.csv")).unwrap();
    let expect: Vec<f64> = out.trajectory.iter().map(|p| p.best_fitness).collect();
    assert_eq!(best, expect);
    let lines = std::fs::read_to_string(dir.path().join("records.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), out.records.len());
    let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(first["operator"], "E1");
    let score = std::fs::read_to_string(dir.path().join("best.score")).unwrap();
    assert!(stowage_core::dsl::ScoreProgram::parse(score.trim()).is_ok());
}

//! Pattern pools gathered from many randomized greedy runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SpError;
use crate::constructive::{greedy_solve, ConstraintProfile, Scorer, SolveOptions};
use crate::geometry::{Orientation, Position};
use crate::instance::{instance_from_value, instance_to_value, Instance, InstanceError, Placement, Solution};

/// One unit inside a pattern's container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternPlacement {
    pub item_type_id: String,
    #[serde(flatten)]
    pub pos: Position,
    pub orientation: Orientation,
}

/// A realised single-container packing, identified by its per-type counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pattern {
    /// Positive counts only.
    pub counts: BTreeMap<String, u32>,
    /// Placements realising `counts`, in packing order.
    pub packing: Vec<PatternPlacement>,
    /// RCL width and seed of the run that first produced the pattern.
    pub beta: f64,
    pub seed: u64,
}

impl Pattern {
    pub fn from_packing(packing: Vec<PatternPlacement>, beta: f64, seed: u64) -> Self {
        let mut counts = BTreeMap::new();
        for p in &packing {
            *counts.entry(p.item_type_id.clone()).or_insert(0) += 1;
        }
        Self { counts, packing, beta, seed }
    }

    /// Canonical text of the count vector, e.g. `t1:3,t2:1`.
    pub fn signature(&self) -> String {
        signature_of(&self.counts)
    }

    pub fn count(&self, id: &str) -> u32 {
        self.counts.get(id).copied().unwrap_or(0)
    }

    pub fn units(&self) -> u32 {
        self.counts.values().sum()
    }

    /// Placements of this pattern in container `index`.
    pub fn placements(&self, index: usize) -> impl Iterator<Item = Placement> + '_ {
        self.packing.iter().map(move |p| Placement {
            container_index: index,
            item_type_id: p.item_type_id.clone(),
            pos: p.pos,
            orientation: p.orientation,
        })
    }
}

pub(crate) fn signature_of(counts: &BTreeMap<String, u32>) -> String {
    counts.iter().filter(|(_, &c)| c > 0).map(|(k, c)| format!("{k}:{c}")).collect::<Vec<_>>().join(",")
}

/// Outcome of one pool run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub beta: f64,
    pub seed: u64,
    /// `None` when the run timed out.
    pub containers: Option<usize>,
    /// Pool index of each of the run's containers.
    #[serde(default)]
    pub pattern_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pool {
    pub instance: Instance,
    pub profile: ConstraintProfile,
    /// Unique signatures, in order of first appearance.
    pub patterns: Vec<Pattern>,
    pub runs: Vec<RunRecord>,
}

/// One deterministic run, then 200 runs each at β = 0.05 and β = 0.15.
pub const DEFAULT_SCHEDULE: [(f64, usize); 3] = [(0.0, 1), (0.05, 200), (0.15, 200)];

#[derive(Debug, Clone, PartialEq)]
pub struct PoolOptions {
    /// `(beta, runs)` stages executed in order.
    pub schedule: Vec<(f64, usize)>,
    pub base_seed: u64,
    /// Per-run time limit; timed-out runs contribute no patterns.
    pub run_time_limit: Option<Duration>,
}

impl Default for PoolOptions {
    fn default() -> Self {
        Self { schedule: DEFAULT_SCHEDULE.to_vec(), base_seed: 0, run_time_limit: None }
    }
}

impl Pool {
    pub fn new(instance: Instance, profile: ConstraintProfile) -> Self {
        Self { instance, profile, patterns: Vec::new(), runs: Vec::new() }
    }

    /// Adds every container of `sol` whose signature is new. Returns the
    /// pool index of each container.
    pub fn absorb(&mut self, sol: &Solution, beta: f64, seed: u64) -> Vec<usize> {
        let mut seen: BTreeMap<String, usize> =
            self.patterns.iter().enumerate().map(|(i, p)| (p.signature(), i)).collect();
        let mut per_container: Vec<Vec<PatternPlacement>> = vec![Vec::new(); sol.containers_used];
        for p in &sol.placements {
            per_container[p.container_index].push(PatternPlacement {
                item_type_id: p.item_type_id.clone(),
                pos: p.pos,
                orientation: p.orientation,
            });
        }
        let mut indices = Vec::with_capacity(per_container.len());
        for packing in per_container.into_iter().filter(|p| !p.is_empty()) {
            let pattern = Pattern::from_packing(packing, beta, seed);
            let next = self.patterns.len();
            let index = *seen.entry(pattern.signature()).or_insert(next);
            if index == next {
                self.patterns.push(pattern);
            }
            indices.push(index);
        }
        indices
    }

    /// Fewest containers over completed runs.
    pub fn best_run(&self) -> Option<usize> {
        self.runs.iter().filter_map(|r| r.containers).min()
    }

    pub fn covers(&self, id: &str) -> bool {
        self.patterns.iter().any(|p| p.count(id) > 0)
    }

    pub fn to_json(&self) -> String {
        let doc = PoolDoc {
            instance: instance_to_value(&self.instance),
            profile: self.profile,
            runs: self.runs.clone(),
            patterns: self.patterns.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("pool serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, SpError> {
        let doc: PoolDoc = serde_json::from_str(text)
            .map_err(|e| InstanceError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        let instance = instance_from_value(doc.instance)?;
        for (k, p) in doc.patterns.iter().enumerate() {
            let tally = Pattern::from_packing(p.packing.clone(), p.beta, p.seed).counts;
            if tally != p.counts {
                return Err(SpError::InvalidPool(format!("pattern {k}: counts disagree with its packing")));
            }
            if let Some(id) = p.counts.keys().find(|id| instance.item_type(id).is_none()) {
                return Err(SpError::InvalidPool(format!("pattern {k}: unknown item type `{id}`")));
            }
        }
        if doc.runs.iter().flat_map(|r| &r.pattern_indices).any(|&i| i >= doc.patterns.len()) {
            return Err(SpError::InvalidPool("run references a missing pattern".into()));
        }
        Ok(Self { instance, profile: doc.profile, patterns: doc.patterns, runs: doc.runs })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), SpError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| InstanceError::io(path, e).into())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, SpError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| InstanceError::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoolDoc {
    instance: serde_json::Value,
    profile: ConstraintProfile,
    runs: Vec<RunRecord>,
    patterns: Vec<Pattern>,
}

/// Runs the schedule in parallel (seed = `base_seed ^ run`, `run` counting
/// across all stages) and merges the containers in run order.
pub fn generate_pool(
    inst: &Instance,
    scorer: &(dyn Scorer + Sync),
    profile: ConstraintProfile,
    opts: &PoolOptions,
) -> Result<Pool, SpError> {
    if opts.schedule.is_empty() {
        return Err(SpError::EmptySchedule);
    }
    let jobs: Vec<(f64, u64)> = opts
        .schedule
        .iter()
        .flat_map(|&(beta, n)| std::iter::repeat_n(beta, n))
        .enumerate()
        .map(|(run, beta)| (beta, opts.base_seed ^ run as u64))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(beta, seed)| {
            let mut so = SolveOptions::randomized(beta, seed);
            if let Some(limit) = opts.run_time_limit {
                so = so.with_time_limit(limit);
            }
            greedy_solve(inst, scorer, profile, so)
        })
        .collect();

    let mut pool = Pool::new(inst.clone(), profile);
    for (&(beta, seed), result) in jobs.iter().zip(results) {
        match result {
            Ok(sol) => {
                let pattern_indices = pool.absorb(&sol, beta, seed);
                pool.runs.push(RunRecord { beta, seed, containers: Some(sol.containers_used), pattern_indices });
            }
            Err(e) => {
                log::warn!("{}: pool run beta={beta} seed={seed} skipped: {e}", inst.name);
                pool.runs.push(RunRecord { beta, seed, containers: None, pattern_indices: Vec::new() });
            }
        }
    }
    Ok(pool)
}

//! The pool-and-select hybrid: many randomized greedy runs contribute their
//! containers as patterns, and an exact master problem picks the fewest
//! patterns that meet demand.

mod bnb;
mod lp;
mod pool;
mod trim;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Tolerance;
use crate::instance::{Instance, InstanceError, Solution};

pub use bnb::{solve_counts, CountProblem, CountSolution, NoSolution, SpMode};
pub use lp::{export_lp, lp_string};
pub use pool::{generate_pool, Pattern, PatternPlacement, Pool, PoolOptions, RunRecord, DEFAULT_SCHEDULE};
pub use trim::trim_surplus;

#[derive(Debug, Error)]
pub enum SpError {
    #[error("pool schedule is empty")]
    EmptySchedule,
    #[error("no pattern in the pool contains item type `{0}`")]
    Uncovered(String),
    #[error("item type `{0}` is not part of the instance")]
    UnknownType(String),
    #[error("no combination of pool patterns meets the demand exactly")]
    NoExactPartition,
    #[error("time limit reached before any selection was found")]
    NoSolutionInTime,
    #[error("invalid pool: {0}")]
    InvalidPool(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpOptions {
    pub time_limit: Option<Duration>,
    pub mode: SpMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpSolution {
    /// Pool index to positive multiplicity.
    pub multiplicities: BTreeMap<usize, u32>,
    pub total_containers: usize,
    /// The selection with surplus units removed.
    pub trimmed: Solution,
    /// False when the time limit cut the search short.
    pub optimal: bool,
    pub nodes: u64,
}

/// `ceil(total item volume / container volume)`.
pub fn volume_lower_bound(inst: &Instance) -> u64 {
    let ratio = inst.total_item_volume() / inst.container.volume();
    (ratio - 1e-9).ceil().max(0.0) as u64
}

/// Exact minimum over pattern multisets meeting `demands` (or matching
/// them in [`SpMode::Exact`]), followed by surplus trimming.
pub fn solve_set_partition(pool: &Pool, demands: &BTreeMap<String, u32>, opts: SpOptions) -> Result<SpSolution, SpError> {
    let deadline = opts.time_limit.map(|d| Instant::now() + d);
    let inst = &pool.instance;
    let ids: Vec<&String> = demands.iter().filter(|(_, &d)| d > 0).map(|(k, _)| k).collect();
    let mut volumes = Vec::with_capacity(ids.len());
    for id in &ids {
        let t = inst.item_type(id).ok_or_else(|| SpError::UnknownType((*id).clone()))?;
        if !pool.covers(id) {
            return Err(SpError::Uncovered((*id).clone()));
        }
        volumes.push(t.volume());
    }
    let mut columns: Vec<Vec<u32>> = pool.patterns.iter().map(|p| ids.iter().map(|id| p.count(id)).collect()).collect();
    if opts.mode == SpMode::Exact {
        // A pattern holding undemanded types can never be part of an exact selection.
        for (col, p) in columns.iter_mut().zip(&pool.patterns) {
            if p.counts.keys().any(|k| demands.get(k).copied().unwrap_or(0) == 0) {
                col.iter_mut().for_each(|c| *c = u32::MAX);
            }
        }
    }
    let problem = CountProblem {
        columns,
        demand: ids.iter().map(|id| demands[*id]).collect(),
        volumes,
        container_volume: inst.container.volume(),
        mode: opts.mode,
    };
    let hints: Vec<Vec<u32>> = pool
        .runs
        .iter()
        .filter(|r| r.containers.is_some())
        .map(|r| {
            let mut x = vec![0; pool.patterns.len()];
            r.pattern_indices.iter().for_each(|&i| x[i] += 1);
            x
        })
        .collect();
    let sol = solve_counts(&problem, &hints, deadline).map_err(|e| match (e, opts.mode) {
        (NoSolution::TimedOut, _) => SpError::NoSolutionInTime,
        (NoSolution::Infeasible, SpMode::Exact) => SpError::NoExactPartition,
        (NoSolution::Infeasible, SpMode::Cover) => SpError::Uncovered(ids.first().map(|s| s.to_string()).unwrap_or_default()),
    })?;

    let multiplicities: BTreeMap<usize, u32> =
        sol.multiplicities.iter().enumerate().filter(|(_, &m)| m > 0).map(|(p, &m)| (p, m)).collect();
    let selected: Vec<&Pattern> =
        multiplicities.iter().flat_map(|(&p, &m)| std::iter::repeat_n(&pool.patterns[p], m as usize)).collect();
    let trimmed = trim_surplus(inst, &selected, demands, pool.profile, Tolerance::default())?;
    Ok(SpSolution {
        total_containers: sol.total as usize,
        multiplicities,
        trimmed,
        optimal: sol.optimal,
        nodes: sol.nodes,
    })
}

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stowage_core::constructive::{greedy_solve, ConstraintProfile, Regime, SolveOptions, UtilizationScorer};
use stowage_core::geometry::{Dims, Orientation, Position};
use stowage_core::instance::{synth_instance, Instance, ItemType, Placement, Solution, SynthProfile};
use stowage_core::setpart::{generate_pool, Pool, PoolOptions, SpMode};

pub fn d(l: f64, w: f64, h: f64) -> Dims {
    Dims::new(l, w, h).unwrap()
}

pub fn place(c: usize, id: &str, x: f64, y: f64, z: f64, o: usize) -> Placement {
    Placement { container_index: c, item_type_id: id.into(), pos: Position::new(x, y, z), orientation: Orientation::ALL[o] }
}

pub fn solution(name: &str, placements: Vec<Placement>) -> Solution {
    Solution::from_placements(name, placements)
}

pub fn one_type(container: Dims, item: Dims, qty: u32) -> Instance {
    Instance::new("one-type", container, vec![ItemType::new("a", item, qty)], None).unwrap()
}

/// Smallest multiset size meeting the demand, by enumerating multisets of
/// size 0, 1, 2, ... in order.
pub fn brute_force_cover(columns: &[Vec<u32>], demand: &[u32], mode: SpMode, max_k: u32) -> Option<u32> {
    fn rec(columns: &[Vec<u32>], demand: &[u32], mode: SpMode, start: usize, left: u32, acc: &mut Vec<u32>) -> bool {
        if left == 0 {
            return acc.iter().zip(demand).all(|(&a, &d)| match mode {
                SpMode::Cover => a >= d,
                SpMode::Exact => a == d,
            });
        }
        for p in start..columns.len() {
            for (a, &c) in acc.iter_mut().zip(&columns[p]) {
                *a += c;
            }
            let hit = rec(columns, demand, mode, p, left - 1, acc);
            for (a, &c) in acc.iter_mut().zip(&columns[p]) {
                *a -= c;
            }
            if hit {
                return true;
            }
        }
        false
    }
    (0..=max_k).find(|&k| rec(columns, demand, mode, 0, k, &mut vec![0; demand.len()]))
}

/// A pool with at most `max_patterns` patterns drawn from greedy runs on a
/// small synthetic instance, plus the instance's demands.
pub fn small_pool(seed: u64, regime: Regime, max_patterns: usize) -> (Pool, BTreeMap<String, u32>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = synth_instance(seed, SynthProfile::Small);
    // Keep at most six types and at most five units per type.
    let types: Vec<ItemType> = base
        .item_types
        .iter()
        .take(6)
        .map(|t| ItemType { quantity: t.quantity.min(rng.gen_range(1..=5)), ..t.clone() })
        .collect();
    let inst = Instance::new(base.name.clone(), base.container, types, None).unwrap();
    let opts = PoolOptions { schedule: vec![(0.0, 1), (0.3, 6), (1.0, 6)], base_seed: seed, run_time_limit: None };
    let mut pool = generate_pool(&inst, &UtilizationScorer, regime.profile(), &opts).unwrap();
    // Keep the deterministic run's patterns so the pool stays feasible,
    // then a random subset of the rest.
    let keep_first: Vec<usize> = pool.runs[0].pattern_indices.clone();
    let mut others: Vec<usize> = (0..pool.patterns.len()).filter(|i| !keep_first.contains(i)).collect();
    others.shuffle(&mut rng);
    let mut keep: Vec<usize> = keep_first;
    keep.sort();
    keep.dedup();
    keep.extend(others.into_iter().take(max_patterns.saturating_sub(keep.len())));
    keep.truncate(max_patterns.max(1));
    keep.sort();
    let remap: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    pool.patterns = keep.iter().map(|&i| pool.patterns[i].clone()).collect();
    for r in &mut pool.runs {
        if r.pattern_indices.iter().all(|i| remap.contains_key(i)) {
            r.pattern_indices = r.pattern_indices.iter().map(|i| remap[i]).collect();
        } else {
            r.containers = None;
            r.pattern_indices.clear();
        }
    }
    let demands = inst.demands();
    (pool, demands)
}

pub fn greedy(inst: &Instance, profile: ConstraintProfile) -> Solution {
    greedy_solve(inst, &UtilizationScorer, profile, SolveOptions::default()).unwrap()
}

mod common;

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{d, greedy, one_type};
use stowage_core::constructive::{
    first_fit_solve, greedy_solve, ConstantScorer, ConstraintProfile, Regime, SolveOptions, UtilizationScorer,
};
use stowage_core::dsl::ScoreProgram;
use stowage_core::geometry::Orientation;
use stowage_core::harness::{verify_solution, ViolationKind};
use stowage_core::instance::{synth_instance, Instance, ItemType, SynthProfile};
use stowage_core::setpart::volume_lower_bound;

type Box3 = ([i64; 3], [i64; 3]);

/// Exhaustive corner-point packing search for integer instances: can this
/// multiset of (type index, count) go into one container? States reached in
/// different orders are visited once.
struct TreeOracle<'a> {
    inst: &'a Instance,
    container: [i64; 3],
    alpha: Option<f64>,
    packable: HashMap<Vec<u32>, bool>,
}

impl<'a> TreeOracle<'a> {
    fn new(inst: &'a Instance, alpha: Option<f64>) -> Self {
        let c = inst.container;
        Self { inst, container: [c.length as i64, c.width as i64, c.height as i64], alpha, packable: HashMap::new() }
    }

    fn extents(&self, t: usize) -> Vec<[i64; 3]> {
        let it = &self.inst.item_types[t];
        let mut v: Vec<[i64; 3]> = it
            .allowed_orientations
            .iter()
            .map(|o| {
                let e = o.apply(it.base);
                [e.length as i64, e.width as i64, e.height as i64]
            })
            .collect();
        v.sort();
        v.dedup();
        v
    }

    fn admissible(&self, placed: &[Box3], lo: [i64; 3], ext: [i64; 3]) -> bool {
        if (0..3).any(|a| lo[a] < 0 || lo[a] + ext[a] > self.container[a]) {
            return false;
        }
        let overlaps = |(plo, pext): &Box3| (0..3).all(|a| lo[a] < plo[a] + pext[a] && plo[a] < lo[a] + ext[a]);
        if placed.iter().any(overlaps) {
            return false;
        }
        match self.alpha {
            Some(alpha) if lo[2] > 0 => {
                let supported: i64 = placed
                    .iter()
                    .filter(|(plo, pext)| plo[2] + pext[2] == lo[2])
                    .map(|(plo, pext)| {
                        let dx = (lo[0] + ext[0]).min(plo[0] + pext[0]) - lo[0].max(plo[0]);
                        let dy = (lo[1] + ext[1]).min(plo[1] + pext[1]) - lo[1].max(plo[1]);
                        dx.max(0) * dy.max(0)
                    })
                    .sum();
                supported as f64 >= alpha * (ext[0] * ext[1]) as f64
            }
            _ => true,
        }
    }

    fn search(&self, left: &mut Vec<u32>, placed: &mut Vec<Box3>, seen: &mut HashSet<Vec<Box3>>) -> bool {
        if left.iter().all(|&n| n == 0) {
            return true;
        }
        let mut key = placed.clone();
        key.sort();
        if !seen.insert(key) {
            return false;
        }
        let mut points = vec![[0, 0, 0]];
        for (lo, ext) in placed.iter() {
            points.push([lo[0] + ext[0], lo[1], lo[2]]);
            points.push([lo[0], lo[1] + ext[1], lo[2]]);
            points.push([lo[0], lo[1], lo[2] + ext[2]]);
        }
        for t in 0..left.len() {
            if left[t] == 0 {
                continue;
            }
            for ext in self.extents(t) {
                for &p in &points {
                    if !self.admissible(placed, p, ext) {
                        continue;
                    }
                    left[t] -= 1;
                    placed.push((p, ext));
                    let ok = self.search(left, placed, seen);
                    placed.pop();
                    left[t] += 1;
                    if ok {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn fits(&mut self, counts: &[u32]) -> bool {
        if let Some(&v) = self.packable.get(counts) {
            return v;
        }
        let v = self.search(&mut counts.to_vec(), &mut Vec::new(), &mut HashSet::new());
        self.packable.insert(counts.to_vec(), v);
        v
    }

    /// Fewest containers over all splits of the demand into packable groups.
    fn optimum(&mut self) -> u32 {
        let demand: Vec<u32> = self.inst.item_types.iter().map(|t| t.quantity).collect();
        let mut memo = HashMap::new();
        self.min_bins(&demand, &mut memo)
    }

    fn min_bins(&mut self, left: &[u32], memo: &mut HashMap<Vec<u32>, u32>) -> u32 {
        if left.iter().all(|&n| n == 0) {
            return 0;
        }
        if let Some(&v) = memo.get(left) {
            return v;
        }
        // The first remaining type's lowest unit goes into the next container,
        // with any sub-multiset of the rest.
        let first = left.iter().position(|&n| n > 0).unwrap();
        let mut best = u32::MAX;
        let mut group = vec![0u32; left.len()];
        group[first] = 1;
        loop {
            if self.fits(&group) {
                let rest: Vec<u32> = left.iter().zip(&group).map(|(a, b)| a - b).collect();
                best = best.min(1 + self.min_bins(&rest, memo));
            }
            // Next sub-multiset in mixed radix, keeping the forced unit.
            let mut k = 0;
            loop {
                if k == left.len() {
                    memo.insert(left.to_vec(), best);
                    return best;
                }
                let floor = u32::from(k == first);
                if group[k] < left[k] {
                    group[k] += 1;
                    break;
                }
                group[k] = floor;
                k += 1;
            }
        }
    }
}

#[test]
fn tree_oracle_bounds_the_greedy_from_below() {
    let program = ScoreProgram::parse("0.9*vol_util + 0.05*quantity + 0.05*adjacency").unwrap();
    let mut equal = 0;
    let cases = 150;
    for seed in 0..cases {
        let inst = synth_instance(seed, SynthProfile::Tiny);
        for regime in [Regime::Base, Regime::Stability] {
            let profile = regime.profile();
            let sol = greedy_solve(&inst, &program, profile, SolveOptions::default()).unwrap();
            assert!(verify_solution(&inst, &sol, profile).ok);
            let opt = TreeOracle::new(&inst, profile.stability).optimum();
            let lb = volume_lower_bound(&inst);
            assert!(lb <= opt as u64, "seed {seed}: volume bound {lb} above tree optimum {opt}");
            assert!(sol.containers_used as u32 >= opt, "seed {seed} {regime}: greedy {} below oracle {opt}", sol.containers_used);
            if sol.containers_used as u32 == opt {
                equal += 1;
            }
        }
    }
    println!("greedy matched the tree optimum on {equal} of {} runs", 2 * cases);
    assert!(equal > 0);
}

#[test]
fn filling_items_take_one_container_each() {
    let one = one_type(d(3.0, 4.0, 5.0), d(3.0, 4.0, 5.0), 1);
    let sol = greedy(&one, ConstraintProfile::BASE);
    assert_eq!(sol.containers_used, 1);
    assert_eq!(sol.placements[0].pos.as_array(), [0.0; 3]);
    let two = one_type(d(3.0, 4.0, 5.0), d(3.0, 4.0, 5.0), 2);
    assert_eq!(greedy(&two, ConstraintProfile::BASE).containers_used, 2);
}

fn random_small(seed: u64) -> Instance {
    let base = synth_instance(seed, SynthProfile::Small);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Occasionally restrict orientations, keeping at least one that fits.
    let types = base
        .item_types
        .iter()
        .map(|t| {
            if rng.gen_bool(0.3) {
                let fit = t.fitting_orientations(&base.container, Default::default()).next().unwrap();
                let extra: Vec<Orientation> = Orientation::ALL.into_iter().filter(|_| rng.gen_bool(0.3)).collect();
                t.clone().with_orientations(std::iter::once(fit).chain(extra))
            } else {
                t.clone()
            }
        })
        .collect::<Vec<ItemType>>();
    Instance::new(base.name, base.container, types, None).unwrap()
}

#[test]
fn randomized_runs_verify_in_every_regime() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for run in 0..240u64 {
        let inst = if run % 3 == 0 { synth_instance(run, SynthProfile::Tiny) } else { random_small(run) };
        let regime = Regime::ALL[run as usize % 4];
        let beta = [0.0, 0.05, 0.15, 0.5, 1.0][rng.gen_range(0..5)];
        let sol = greedy_solve(&inst, &UtilizationScorer, regime.profile(), SolveOptions::randomized(beta, run)).unwrap();
        let report = verify_solution(&inst, &sol, regime.profile());
        assert!(report.ok, "run {run} ({regime}, beta {beta}): {report}");
        let ff = first_fit_solve(&inst, regime.profile());
        let report = verify_solution(&inst, &ff, regime.profile());
        assert!(report.ok, "first-fit run {run} ({regime}): {report}");
    }
}

#[test]
fn removing_any_placement_keeps_geometry_valid() {
    for seed in 0..40u64 {
        let inst = synth_instance(seed, SynthProfile::Small);
        let regime = Regime::ALL[seed as usize % 4];
        let sol = greedy_solve(&inst, &UtilizationScorer, regime.profile(), SolveOptions::randomized(0.3, seed)).unwrap();
        for i in 0..sol.placements.len() {
            let mut cut = sol.clone();
            cut.placements.remove(i);
            let r = verify_solution(&inst, &cut, ConstraintProfile { stability: None, ..regime.profile() });
            assert!(!r.has(ViolationKind::Overlap) && !r.has(ViolationKind::Bounds) && !r.has(ViolationKind::Separation));
        }
    }
}

#[test]
fn deterministic_across_calls_and_thread_counts() {
    let instances: Vec<Instance> = (0..12).map(|s| synth_instance(s, SynthProfile::Small)).collect();
    let solve_all = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            use rayon::prelude::*;
            instances.par_iter().map(|i| greedy(i, Regime::Both.profile())).collect::<Vec<_>>()
        })
    };
    let one = solve_all(1);
    assert_eq!(one, solve_all(4));
    assert_eq!(one, solve_all(1));
    let seeded = |s| greedy_solve(&instances[0], &UtilizationScorer, ConstraintProfile::BASE, SolveOptions::randomized(0.5, s));
    assert_eq!(seeded(9).unwrap(), seeded(9).unwrap());
}

#[test]
fn constant_scorer_picks_by_tie_break_only() {
    // All-equal scores leave the explicit order: existing containers, then
    // lowest z, y, x, so both boxes share one container.
    let inst = one_type(d(4.0, 2.0, 2.0), d(2.0, 2.0, 2.0), 2);
    let sol = greedy_solve(&inst, &ConstantScorer(1.0), ConstraintProfile::BASE, SolveOptions::default()).unwrap();
    assert_eq!(sol.containers_used, 1);
    let xs: Vec<f64> = sol.placements.iter().map(|p| p.pos.x).collect();
    assert_eq!(xs, vec![0.0, 2.0]);
}

#[test]
fn first_fit_places_larger_units_first() {
    let c = d(4.0, 4.0, 4.0);
    let inst = Instance::new(
        "ff",
        c,
        vec![ItemType::new("small", d(1.0, 1.0, 1.0), 2), ItemType::new("slab", d(4.0, 4.0, 2.0), 2)],
        None,
    )
    .unwrap();
    let sol = first_fit_solve(&inst, Regime::Stability.profile());
    assert!(verify_solution(&inst, &sol, Regime::Stability.profile()).ok);
    let order: Vec<&str> = sol.placements.iter().map(|p| p.item_type_id.as_str()).collect();
    assert_eq!(order, ["slab", "slab", "small", "small"]);
    let per: BTreeMap<usize, usize> = sol.placements.iter().fold(BTreeMap::new(), |mut m, p| {
        *m.entry(p.container_index).or_default() += 1;
        m
    });
    assert_eq!(per, BTreeMap::from([(0, 2), (1, 2)]));
}

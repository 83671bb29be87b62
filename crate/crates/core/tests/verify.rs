mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{d, greedy, one_type, place, solution};
use stowage_core::constructive::{ConstraintProfile, Regime};
use stowage_core::geometry::{orient, Orientation};
use stowage_core::harness::{verify_solution, ViolationKind};
use stowage_core::instance::{synth_instance, Instance, ItemType, Separation, Solution, SynthProfile};

/// Item type id, integer origin and integer placed extents.
type GridBox = (String, [i64; 3], [i64; 3]);

#[test]
fn coincident_unit_boxes_are_reported_together() {
    let inst = one_type(d(4.0, 4.0, 4.0), d(1.0, 1.0, 1.0), 2);
    let sol = solution("x", vec![place(0, "a", 1.0, 1.0, 0.0, 0), place(0, "a", 1.0, 1.0, 0.0, 0)]);
    let report = verify_solution(&inst, &sol, ConstraintProfile::BASE);
    assert!(!report.ok);
    let overlaps: Vec<_> = report.violations.iter().filter(|v| v.kind == ViolationKind::Overlap).collect();
    assert_eq!(overlaps.len(), 1);
    assert!(overlaps[0].detail.contains("#0") && overlaps[0].detail.contains("#1"));
}

#[test]
fn half_overhang_fails_full_support_only() {
    let inst = one_type(d(4.0, 4.0, 4.0), d(2.0, 2.0, 1.0), 2);
    let sol = solution("x", vec![place(0, "a", 0.0, 0.0, 0.0, 0), place(0, "a", 1.0, 0.0, 1.0, 0)]);
    assert!(verify_solution(&inst, &sol, ConstraintProfile::BASE).ok);
    let half = ConstraintProfile::new(Some(0.5), false).unwrap();
    assert!(verify_solution(&inst, &sol, half).ok);
    let full = verify_solution(&inst, &sol, Regime::Stability.profile());
    assert!(full.has(ViolationKind::Stability));
    assert_eq!(full.violations.len(), 1);
}

#[test]
fn touching_faces_are_not_overlaps() {
    let inst = one_type(d(2.0, 1.0, 1.0), d(1.0, 1.0, 1.0), 2);
    let sol = solution("x", vec![place(0, "a", 0.0, 0.0, 0.0, 0), place(0, "a", 1.0, 0.0, 0.0, 0)]);
    assert!(verify_solution(&inst, &sol, Regime::Both.profile()).ok);
}

#[test]
fn empty_demand_accepts_empty_solution_only() {
    let inst = one_type(d(2.0, 2.0, 2.0), d(1.0, 1.0, 1.0), 0);
    assert!(verify_solution(&inst, &Solution::empty("x"), ConstraintProfile::BASE).ok);
    let wrong = Solution { containers_used: 1, ..Solution::empty("x") };
    assert!(verify_solution(&inst, &wrong, ConstraintProfile::BASE).has(ViolationKind::Demand));
}

#[test]
fn unknown_types_and_bad_counts_are_demand_violations() {
    let inst = one_type(d(4.0, 4.0, 4.0), d(1.0, 1.0, 1.0), 1);
    let sol = solution("x", vec![place(0, "zz", 0.0, 0.0, 0.0, 0)]);
    let r = verify_solution(&inst, &sol, ConstraintProfile::BASE);
    assert!(r.has(ViolationKind::Demand));
    assert!(r.violations.iter().all(|v| v.kind == ViolationKind::Demand));
}

/// Small integer instance with random orientation restrictions and, half of
/// the time, explicit separation groups.
fn tiny_integer_instance(rng: &mut ChaCha8Rng) -> Instance {
    let c = d(rng.gen_range(3..=6) as f64, rng.gen_range(3..=6) as f64, rng.gen_range(3..=6) as f64);
    let n = rng.gen_range(1..=3);
    let mut types = Vec::new();
    for k in 0..n {
        let base = d(rng.gen_range(1..=3) as f64, rng.gen_range(1..=3) as f64, rng.gen_range(1..=3) as f64);
        let t = ItemType::new(format!("t{k}"), base, rng.gen_range(1..=3));
        let mut allowed: Vec<Orientation> = Orientation::ALL.into_iter().filter(|_| rng.gen_bool(0.6)).collect();
        if allowed.is_empty() {
            allowed.push(Orientation::ALL[0]);
        }
        types.push(t.with_orientations(allowed));
    }
    let separation = (n >= 2 && rng.gen_bool(0.5)).then(|| Separation {
        group_a: BTreeSet::from(["t0".to_string()]),
        group_b: BTreeSet::from([format!("t{}", n - 1)]),
    });
    Instance::new("tiny-int", c, types, separation).unwrap()
}

/// Cell-enumeration checker for integer geometry. Each unit cell is
/// identified by its minimum corner.
fn grid_accepts(inst: &Instance, sol: &Solution, profile: ConstraintProfile) -> bool {
    let c = [inst.container.length as i64, inst.container.width as i64, inst.container.height as i64];
    let mut per_container: BTreeMap<usize, Vec<GridBox>> = BTreeMap::new();
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for p in &sol.placements {
        let Some(t) = inst.item_type(&p.item_type_id) else { return false };
        if !t.allowed_orientations.contains(&p.orientation) {
            return false;
        }
        let dims = orient(t.base, p.orientation.index() as i64).unwrap();
        let lo = [p.pos.x as i64, p.pos.y as i64, p.pos.z as i64];
        let ext = [dims.length as i64, dims.width as i64, dims.height as i64];
        *counts.entry(t.id.clone()).or_default() += 1;
        per_container.entry(p.container_index).or_default().push((t.id.clone(), lo, ext));
    }
    if inst.item_types.iter().any(|t| counts.get(&t.id).copied().unwrap_or(0) != t.quantity) {
        return false;
    }
    if sol.placements.iter().map(|p| p.container_index + 1).max().unwrap_or(0) != sol.containers_used {
        return false;
    }
    let groups = if profile.separation { inst.separation_groups() } else { None };
    for boxes in per_container.values() {
        let mut occupancy: HashMap<[i64; 3], u32> = HashMap::new();
        // Cells whose top face (z + 1) belongs to some box, keyed by (x, y, top).
        let mut tops: HashMap<[i64; 3], u32> = HashMap::new();
        for (_, lo, ext) in boxes {
            for x in lo[0]..lo[0] + ext[0] {
                for y in lo[1]..lo[1] + ext[1] {
                    for z in lo[2]..lo[2] + ext[2] {
                        if x < 0 || y < 0 || z < 0 || x >= c[0] || y >= c[1] || z >= c[2] {
                            return false;
                        }
                        *occupancy.entry([x, y, z]).or_default() += 1;
                    }
                    *tops.entry([x, y, lo[2] + ext[2]]).or_default() += 1;
                }
            }
        }
        if occupancy.values().any(|&n| n > 1) {
            return false;
        }
        if let Some(alpha) = profile.stability {
            for (_, lo, ext) in boxes {
                if lo[2] == 0 {
                    continue;
                }
                let mut supported = 0;
                for x in lo[0]..lo[0] + ext[0] {
                    for y in lo[1]..lo[1] + ext[1] {
                        if tops.contains_key(&[x, y, lo[2]]) {
                            supported += 1;
                        }
                    }
                }
                if (supported as f64) < alpha * (ext[0] * ext[1]) as f64 {
                    return false;
                }
            }
        }
        if let Some(sep) = &groups {
            let ids: BTreeSet<&str> = boxes.iter().map(|b| b.0.as_str()).collect();
            if ids.iter().any(|i| sep.group_a.contains(*i)) && ids.iter().any(|i| sep.group_b.contains(*i)) {
                return false;
            }
        }
    }
    true
}

/// Applies one random integer edit to a copy of `sol`.
fn random_edit(sol: &Solution, rng: &mut ChaCha8Rng) -> Solution {
    let mut out = sol.clone();
    if out.placements.is_empty() {
        return out;
    }
    let i = rng.gen_range(0..out.placements.len());
    match rng.gen_range(0..6) {
        0 => out.placements[i].pos.x += rng.gen_range(-2..=2) as f64,
        1 => out.placements[i].pos.z += rng.gen_range(-1..=2) as f64,
        2 => out.placements[i].orientation = *Orientation::ALL.choose(rng).unwrap(),
        3 => {
            out.placements.remove(i);
        }
        4 => out.placements[i].container_index = rng.gen_range(0..out.containers_used.max(1) + 1),
        _ => {
            let j = rng.gen_range(0..out.placements.len());
            out.placements[i].pos = out.placements[j].pos;
        }
    }
    if rng.gen_bool(0.9) {
        out.containers_used = out.placements.iter().map(|p| p.container_index + 1).max().unwrap_or(0);
    }
    out
}

#[test]
fn verifier_agrees_with_grid_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let profiles = [
        ConstraintProfile::BASE,
        Regime::Stability.profile(),
        Regime::Separation.profile(),
        Regime::Both.profile(),
        ConstraintProfile::new(Some(0.5), false).unwrap(),
    ];
    let (mut accepted, mut rejected) = (0, 0);
    for case in 0..500 {
        let inst = tiny_integer_instance(&mut rng);
        let profile = profiles[case % profiles.len()];
        let base = greedy(&inst, profile);
        let sol = if rng.gen_bool(0.3) { base } else { random_edit(&base, &mut rng) };
        let expected = grid_accepts(&inst, &sol, profile);
        let report = verify_solution(&inst, &sol, profile);
        assert_eq!(report.ok, expected, "case {case}: {inst:?}\n{sol:?}\n{report}");
        if expected {
            accepted += 1;
        } else {
            rejected += 1;
        }
    }
    assert!(accepted >= 100 && rejected >= 100, "accepted {accepted}, rejected {rejected}");
}

#[test]
fn each_perturbation_is_caught_by_its_own_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut tried = BTreeMap::<&str, usize>::new();
    for seed in 0..120u64 {
        let inst = synth_instance(seed, SynthProfile::Small);
        let regime = Regime::ALL[seed as usize % 4];
        let sol = greedy(&inst, regime.profile());
        assert!(verify_solution(&inst, &sol, regime.profile()).ok);
        let i = rng.gen_range(0..sol.placements.len());
        let p = &sol.placements[i];
        let t = inst.item_type(&p.item_type_id).unwrap();
        let dims = p.orientation.apply(t.base);

        let mut out = sol.clone();
        out.placements[i].pos.x = inst.container.length - dims.length + 3e-6;
        assert!(verify_solution(&inst, &out, ConstraintProfile::BASE).has(ViolationKind::Bounds));
        *tried.entry("bounds").or_default() += 1;

        let mut out = sol.clone();
        out.placements.remove(i);
        assert!(verify_solution(&inst, &out, ConstraintProfile::BASE).has(ViolationKind::Demand));
        *tried.entry("demand").or_default() += 1;

        // Any two boxes in one container, moved onto each other.
        if let Some(j) = (0..sol.placements.len()).find(|&j| j != i && sol.placements[j].container_index == p.container_index) {
            let mut out = sol.clone();
            out.placements[i].pos = sol.placements[j].pos;
            assert!(verify_solution(&inst, &out, ConstraintProfile::BASE).has(ViolationKind::Overlap));
            *tried.entry("overlap").or_default() += 1;
        }

        // An integer-extent box lifted by a non-integer amount meets no top face.
        let mut out = sol.clone();
        out.placements[i].pos.z += 0.5;
        assert!(verify_solution(&inst, &out, Regime::Stability.profile()).has(ViolationKind::Stability));
        *tried.entry("stability").or_default() += 1;

        let forbidden: Vec<Orientation> = Orientation::ALL.into_iter().filter(|&o| o != p.orientation).collect();
        let mut restricted = inst.clone();
        let k = restricted.type_index(&t.id).unwrap();
        restricted.item_types[k].allowed_orientations = forbidden;
        assert!(verify_solution(&restricted, &sol, ConstraintProfile::BASE).has(ViolationKind::Orientation));
        *tried.entry("orientation").or_default() += 1;

        if let Some(sep) = inst.separation_groups() {
            let a = sol.placements.iter().find(|q| sep.group_a.contains(&q.item_type_id));
            let b = sol.placements.iter().position(|q| sep.group_b.contains(&q.item_type_id));
            if let (Some(a), Some(b)) = (a, b) {
                let mut out = sol.clone();
                out.placements[b].container_index = a.container_index;
                out.containers_used = out.placements.iter().map(|p| p.container_index + 1).max().unwrap_or(0);
                assert!(verify_solution(&inst, &out, Regime::Separation.profile()).has(ViolationKind::Separation));
                *tried.entry("separation").or_default() += 1;
            }
        }
    }
    for kind in ["bounds", "demand", "overlap", "stability", "orientation", "separation"] {
        assert!(tried.get(kind).copied().unwrap_or(0) >= 30, "{kind}: only {:?} cases", tried.get(kind));
    }
}

#[test]
fn shifts_beyond_twice_epsilon_break_tight_packings() {
    // Eight unit cubes fill a 2x2x2 container exactly, so every coordinate
    // is pinned by a wall or a neighbour.
    let inst = one_type(d(2.0, 2.0, 2.0), d(1.0, 1.0, 1.0), 8);
    let sol = greedy(&inst, Regime::Stability.profile());
    assert_eq!(sol.containers_used, 1);
    assert!(verify_solution(&inst, &sol, Regime::Stability.profile()).ok);
    let delta = 3e-6;
    for i in 0..sol.placements.len() {
        for axis in 0..3 {
            for sign in [-1.0, 1.0] {
                let mut out = sol.clone();
                let pos = &mut out.placements[i].pos;
                let coord = match axis {
                    0 => &mut pos.x,
                    1 => &mut pos.y,
                    _ => &mut pos.z,
                };
                *coord += sign * delta;
                let r = verify_solution(&inst, &out, Regime::Stability.profile());
                assert!(!r.ok, "box {i} axis {axis} sign {sign} went unnoticed");
            }
        }
    }
}

//! Independent solution checker.
//!
//! Shares nothing with the solvers beyond the orientation table: overlap is
//! penetration deeper than ε on all three axes, support is recomputed from
//! scratch for every box.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::constructive::ConstraintProfile;
use crate::geometry::{orient, Dims, Tolerance};
use crate::instance::{Instance, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Bounds,
    Overlap,
    Stability,
    Separation,
    Demand,
    Orientation,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Bounds => "bounds",
            ViolationKind::Overlap => "overlap",
            ViolationKind::Stability => "stability",
            ViolationKind::Separation => "separation",
            ViolationKind::Demand => "demand",
            ViolationKind::Orientation => "orientation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub container_index: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.container_index {
            Some(c) => write!(f, "{} (container {c}): {}", self.kind, self.detail),
            None => write!(f, "{}: {}", self.kind, self.detail),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("ok");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Item {
    // Index into the solution's placements.
    index: usize,
    type_id: String,
    lo: [f64; 3],
    hi: [f64; 3],
}

fn penetration(a: &Item, b: &Item, axis: usize) -> f64 {
    a.hi[axis].min(b.hi[axis]) - a.lo[axis].max(b.lo[axis])
}

fn describe(it: &Item) -> String {
    format!("#{} `{}` at ({}, {}, {})", it.index, it.type_id, it.lo[0], it.lo[1], it.lo[2])
}

pub fn verify_solution(inst: &Instance, sol: &Solution, profile: ConstraintProfile) -> VerificationReport {
    verify_with(inst, sol, profile, Tolerance::default())
}

pub fn verify_with(inst: &Instance, sol: &Solution, profile: ConstraintProfile, tol: Tolerance) -> VerificationReport {
    let e = tol.epsilon;
    let mut out = Vec::new();
    let mut v = |kind, container_index, detail: String| out.push(Violation { kind, container_index, detail });
    let c: Dims = inst.container;
    let cext = [c.length, c.width, c.height];

    let mut containers: BTreeMap<usize, Vec<Item>> = BTreeMap::new();
    for (index, p) in sol.placements.iter().enumerate() {
        let Some(t) = inst.item_types.iter().find(|t| t.id == p.item_type_id) else {
            v(ViolationKind::Demand, Some(p.container_index), format!("#{index} has unknown item type `{}`", p.item_type_id));
            continue;
        };
        if !t.allowed_orientations.iter().any(|o| o.index() == p.orientation.index()) {
            v(
                ViolationKind::Orientation,
                Some(p.container_index),
                format!("#{index} `{}` uses orientation {} outside its allowed set", t.id, p.orientation.index()),
            );
        }
        let d = orient(t.base, p.orientation.index() as i64).expect("orientation indices are in range");
        let lo = [p.pos.x, p.pos.y, p.pos.z];
        let ext = [d.length, d.width, d.height];
        let hi = [lo[0] + ext[0], lo[1] + ext[1], lo[2] + ext[2]];
        let item = Item { index, type_id: t.id.clone(), lo, hi };
        if (0..3).any(|a| lo[a] < -e || hi[a] > cext[a] + e || !lo[a].is_finite()) {
            v(ViolationKind::Bounds, Some(p.container_index), format!("{} leaves the container", describe(&item)));
        }
        containers.entry(p.container_index).or_default().push(item);
    }

    let groups = if profile.separation { inst.separation_groups() } else { None };
    for (&ci, items) in &containers {
        for (k, a) in items.iter().enumerate() {
            for b in &items[k + 1..] {
                if (0..3).all(|axis| penetration(a, b, axis) > e) {
                    v(ViolationKind::Overlap, Some(ci), format!("{} and {} intersect", describe(a), describe(b)));
                }
            }
        }
        if let Some(alpha) = profile.stability {
            for a in items {
                if a.lo[2] <= e {
                    continue;
                }
                let base = (a.hi[0] - a.lo[0]) * (a.hi[1] - a.lo[1]);
                let supported: f64 = items
                    .iter()
                    .filter(|b| b.index != a.index && (b.hi[2] - a.lo[2]).abs() <= e)
                    .map(|b| penetration(a, b, 0).max(0.0) * penetration(a, b, 1).max(0.0))
                    .sum();
                if supported < alpha * base - e {
                    v(
                        ViolationKind::Stability,
                        Some(ci),
                        format!("{} has {supported} of {base} base area supported, needs {}", describe(a), alpha * base),
                    );
                }
            }
        }
        if let Some(sep) = &groups {
            let present: BTreeSet<&str> = items.iter().map(|i| i.type_id.as_str()).collect();
            let a: Vec<&&str> = present.iter().filter(|id| sep.group_a.contains(**id)).collect();
            let b: Vec<&&str> = present.iter().filter(|id| sep.group_b.contains(**id)).collect();
            if !a.is_empty() && !b.is_empty() {
                v(ViolationKind::Separation, Some(ci), format!("holds {a:?} together with {b:?}"));
            }
        }
    }

    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for p in &sol.placements {
        *counts.entry(p.item_type_id.as_str()).or_insert(0) += 1;
    }
    for t in &inst.item_types {
        let got = counts.get(t.id.as_str()).copied().unwrap_or(0);
        if got != t.quantity as u64 {
            v(ViolationKind::Demand, None, format!("`{}` placed {got} times, demand is {}", t.id, t.quantity));
        }
    }
    let derived = sol.placements.iter().map(|p| p.container_index + 1).max().unwrap_or(0);
    if derived != sol.containers_used {
        v(ViolationKind::Demand, None, format!("containers_used is {} but placements use {derived}", sol.containers_used));
    }
    VerificationReport { ok: out.is_empty(), violations: out }
}

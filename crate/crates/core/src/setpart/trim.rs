//! Repair of a covering selection into an exact one.

use std::collections::BTreeMap;

use super::{Pattern, SpError};
use crate::constructive::{greedy_solve, ConstraintProfile, SolveOptions, UtilizationScorer};
use crate::geometry::{is_stable, PlacedBox, Tolerance};
use crate::instance::{Instance, ItemType, Placement, Solution};

fn stable_without(boxes: &[PlacedBox], removed: usize, alpha: f64, tol: Tolerance) -> bool {
    let rest: Vec<PlacedBox> = boxes.iter().enumerate().filter(|&(k, _)| k != removed).map(|(_, b)| b.clone()).collect();
    rest.iter().enumerate().all(|(k, b)| {
        let others: Vec<PlacedBox> = rest.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, o)| o.clone()).collect();
        is_stable(b, &others, alpha, tol)
    })
}

fn fill(boxes: &[PlacedBox]) -> f64 {
    boxes.iter().map(PlacedBox::volume).sum()
}

/// Greedy repack of one container's contents; may need more than one container.
fn repack(inst: &Instance, boxes: &[PlacedBox], profile: ConstraintProfile) -> Result<Vec<Vec<PlacedBox>>, SpError> {
    let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
    for b in boxes {
        *counts.entry(b.item_type_id.as_str()).or_insert(0) += 1;
    }
    let types: Vec<ItemType> = inst
        .item_types
        .iter()
        .filter_map(|t| counts.get(t.id.as_str()).map(|&q| ItemType { quantity: q, ..t.clone() }))
        .collect();
    let sub = Instance::new(format!("{}-repack", inst.name), inst.container, types, None)?;
    // Contents of one container are already separation-compatible.
    let sub_profile = ConstraintProfile { separation: false, ..profile };
    let sol = greedy_solve(&sub, &UtilizationScorer, sub_profile, SolveOptions::default())
        .map_err(|e| SpError::InvalidPool(format!("repack failed: {e}")))?;
    let mut out = vec![Vec::new(); sol.containers_used];
    for p in sol.placements {
        let base = inst.item_type(&p.item_type_id).expect("known type").base;
        out[p.container_index].push(PlacedBox::new(p.item_type_id, p.pos, base, p.orientation));
    }
    Ok(out)
}

/// Expands `selected` (one entry per container) and deletes surplus units
/// until every type count equals its demand. Deletions start in the least
/// filled container and take the topmost unit whose removal keeps every
/// remaining box stable.
pub fn trim_surplus(
    inst: &Instance,
    selected: &[&Pattern],
    demands: &BTreeMap<String, u32>,
    profile: ConstraintProfile,
    tol: Tolerance,
) -> Result<Solution, SpError> {
    let mut containers: Vec<Vec<PlacedBox>> = selected
        .iter()
        .map(|p| {
            p.packing
                .iter()
                .map(|u| {
                    let base = inst.item_type(&u.item_type_id).ok_or_else(|| SpError::UnknownType(u.item_type_id.clone()))?.base;
                    Ok(PlacedBox::new(u.item_type_id.clone(), u.pos, base, u.orientation))
                })
                .collect::<Result<Vec<_>, SpError>>()
        })
        .collect::<Result<_, _>>()?;

    let mut surplus: Vec<(String, u32)> = Vec::new();
    for t in &inst.item_types {
        let have: u32 = containers.iter().flatten().filter(|b| b.item_type_id == t.id).count() as u32;
        let want = demands.get(&t.id).copied().unwrap_or(0);
        if have < want {
            return Err(SpError::Uncovered(t.id.clone()));
        }
        surplus.push((t.id.clone(), have - want));
    }

    for (id, extra) in &mut surplus {
        while *extra > 0 {
            let mut order: Vec<usize> = (0..containers.len()).filter(|&c| containers[c].iter().any(|b| &b.item_type_id == id)).collect();
            order.sort_by(|&a, &b| fill(&containers[a]).total_cmp(&fill(&containers[b])).then(a.cmp(&b)));
            let mut done = false;
            for &c in &order {
                let mut units: Vec<usize> = (0..containers[c].len()).filter(|&k| &containers[c][k].item_type_id == id).collect();
                units.sort_by(|&a, &b| containers[c][b].top().total_cmp(&containers[c][a].top()).then(b.cmp(&a)));
                let hit = units
                    .into_iter()
                    .find(|&k| profile.stability.is_none_or(|alpha| stable_without(&containers[c], k, alpha, tol)));
                if let Some(k) = hit {
                    containers[c].remove(k);
                    done = true;
                    break;
                }
            }
            if !done {
                // Every candidate supports something: drop the topmost unit of
                // the least filled container and repack what is left there.
                let c = order[0];
                let k = (0..containers[c].len())
                    .filter(|&k| &containers[c][k].item_type_id == id)
                    .max_by(|&a, &b| containers[c][a].top().total_cmp(&containers[c][b].top()).then(a.cmp(&b)))
                    .expect("container holds the type");
                containers[c].remove(k);
                let mut packed = repack(inst, &containers[c], profile)?.into_iter();
                containers[c] = packed.next().unwrap_or_default();
                containers.extend(packed);
            }
            *extra -= 1;
        }
    }

    let placements = containers
        .into_iter()
        .filter(|c| !c.is_empty())
        .enumerate()
        .flat_map(|(index, boxes)| {
            boxes.into_iter().map(move |b| Placement {
                container_index: index,
                item_type_id: b.item_type_id,
                pos: b.pos,
                orientation: b.orientation,
            })
        })
        .collect();
    Ok(Solution::from_placements(inst.name.clone(), placements))
}

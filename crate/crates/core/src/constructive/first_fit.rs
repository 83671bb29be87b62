//! First-Fit baseline.

use super::candidates::all_corner_points;
use super::{fits, separation_admits, ConstraintProfile, ContainerState};
use crate::geometry::{PlacedBox, Position, Tolerance};
use crate::instance::{Instance, Placement, Solution};

/// Units by decreasing volume (input order on ties), each placed at the
/// first corner point, ordered by x then y then z, of the first container
/// that admits it; a new container is opened when none does.
pub fn first_fit_solve(inst: &Instance, profile: ConstraintProfile) -> Solution {
    let tol = Tolerance::default();
    let groups = if profile.separation { inst.separation_groups() } else { None };
    let mut units: Vec<usize> =
        inst.item_types.iter().enumerate().flat_map(|(t, it)| std::iter::repeat_n(t, it.quantity as usize)).collect();
    units.sort_by(|&a, &b| inst.item_types[b].volume().total_cmp(&inst.item_types[a].volume()));

    let mut containers: Vec<ContainerState> = Vec::new();
    let mut placements = Vec::with_capacity(units.len());
    for t in units {
        let item = &inst.item_types[t];
        let mut chosen = None;
        'scan: for state in &containers {
            if !separation_admits(state, &item.id, groups.as_ref()) {
                continue;
            }
            for pos in all_corner_points(state, |p| [p.x, p.y, p.z]) {
                for &o in &item.allowed_orientations {
                    if fits(state, pos, o.apply(item.base), inst.container, profile.stability, tol) {
                        chosen = Some((state.index, pos, o));
                        break 'scan;
                    }
                }
            }
        }
        let (c, pos, o) = chosen.unwrap_or_else(|| {
            let o = item
                .fitting_orientations(&inst.container, tol)
                .next()
                .expect("validated instances fit every type in an empty container");
            containers.push(ContainerState::new(containers.len()));
            (containers.len() - 1, Position::ORIGIN, o)
        });
        containers[c].place(PlacedBox::new(item.id.clone(), pos, item.base, o));
        placements.push(Placement { container_index: c, item_type_id: item.id.clone(), pos, orientation: o });
    }
    Solution::from_placements(inst.name.clone(), placements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Dims;
    use crate::instance::ItemType;

    fn d(l: f64, w: f64, h: f64) -> Dims {
        Dims::new(l, w, h).unwrap()
    }

    #[test]
    fn single_unit() {
        let inst = Instance::new("one", d(5.0, 5.0, 5.0), vec![ItemType::new("a", d(1.0, 1.0, 1.0), 1)], None).unwrap();
        let sol = first_fit_solve(&inst, ConstraintProfile::BASE);
        assert_eq!(sol.containers_used, 1);
        assert_eq!(sol.placements[0].pos, Position::ORIGIN);
    }

    #[test]
    fn two_half_slabs_share_a_container() {
        let inst = Instance::new("slabs", d(10.0, 10.0, 10.0), vec![ItemType::new("a", d(5.0, 10.0, 10.0), 2)], None).unwrap();
        let sol = first_fit_solve(&inst, ConstraintProfile::BASE);
        assert_eq!(sol.containers_used, 1);
        assert_eq!(sol.placements[1].pos, Position::new(5.0, 0.0, 0.0));
    }

    #[test]
    fn larger_units_go_first() {
        let c = d(10.0, 10.0, 10.0);
        let inst =
            Instance::new("mix", c, vec![ItemType::new("s", d(1.0, 1.0, 1.0), 2), ItemType::new("b", d(5.0, 5.0, 5.0), 1)], None).unwrap();
        let sol = first_fit_solve(&inst, ConstraintProfile::BASE);
        let order: Vec<&str> = sol.placements.iter().map(|p| p.item_type_id.as_str()).collect();
        assert_eq!(order, ["b", "s", "s"]);
    }
}

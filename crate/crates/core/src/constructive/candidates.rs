//! Corner-point candidate positions.

use super::ContainerState;
use crate::geometry::{Dims, Position, Tolerance};

/// Origin plus the three corner points of every occupied box that leave room
/// for `dims` along the shifted axis. Deduplicated, ordered by (z, y, x).
pub fn candidate_positions(state: &ContainerState, dims: Dims, container: Dims, tol: Tolerance) -> Vec<Position> {
    let e = tol.epsilon;
    let mut out = Vec::with_capacity(3 * state.occupied.len() + 1);
    out.push(Position::ORIGIN);
    for b in &state.occupied {
        let (p, d) = (b.pos, b.dims);
        if p.x + d.length + dims.length <= container.length + e {
            out.push(Position::new(p.x + d.length, p.y, p.z));
        }
        if p.y + d.width + dims.width <= container.width + e {
            out.push(Position::new(p.x, p.y + d.width, p.z));
        }
        if p.z + d.height + dims.height <= container.height + e {
            out.push(Position::new(p.x, p.y, p.z + d.height));
        }
    }
    sort_dedup(&mut out, |p| [p.z, p.y, p.x]);
    out
}

/// Every corner point of the occupied boxes plus the origin, with no axis
/// filter, ordered by `key`.
pub(crate) fn all_corner_points(state: &ContainerState, key: impl Fn(&Position) -> [f64; 3]) -> Vec<Position> {
    let mut out = Vec::with_capacity(3 * state.occupied.len() + 1);
    out.push(Position::ORIGIN);
    for b in &state.occupied {
        let (p, d) = (b.pos, b.dims);
        out.push(Position::new(p.x + d.length, p.y, p.z));
        out.push(Position::new(p.x, p.y + d.width, p.z));
        out.push(Position::new(p.x, p.y, p.z + d.height));
    }
    sort_dedup(&mut out, key);
    out
}

fn sort_dedup(v: &mut Vec<Position>, key: impl Fn(&Position) -> [f64; 3]) {
    let cmp = |a: &Position, b: &Position| {
        let (ka, kb) = (key(a), key(b));
        ka[0].total_cmp(&kb[0]).then(ka[1].total_cmp(&kb[1])).then(ka[2].total_cmp(&kb[2]))
    };
    v.sort_by(cmp);
    v.dedup_by(|a, b| cmp(a, b).is_eq());
}

//! Per-placement features consumed by scorers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ContainerState;
use crate::geometry::{Dims, Position, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Features {
    /// Item volume over container volume.
    pub vol_util: f64,
    /// Flush walls plus matched face coordinates against occupied boxes.
    pub adjacency: f64,
    /// Units of this type still to place, this one included.
    pub quantity: f64,
    /// Growth of the container's pack height.
    pub height_increase: f64,
    /// Face area touching walls or occupied boxes.
    pub contact_area: f64,
    /// Volume over the sum of the extents.
    pub cubeness: f64,
    /// Occupied fraction of the container after placing.
    pub fill_after: f64,
    /// Free container volume after placing.
    pub waste: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    VolUtil,
    Adjacency,
    Quantity,
    HeightIncrease,
    ContactArea,
    Cubeness,
    FillAfter,
    Waste,
}

impl Feature {
    pub const ALL: [Feature; 8] = [
        Feature::VolUtil,
        Feature::Adjacency,
        Feature::Quantity,
        Feature::HeightIncrease,
        Feature::ContactArea,
        Feature::Cubeness,
        Feature::FillAfter,
        Feature::Waste,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::VolUtil => "vol_util",
            Feature::Adjacency => "adjacency",
            Feature::Quantity => "quantity",
            Feature::HeightIncrease => "height_increase",
            Feature::ContactArea => "contact_area",
            Feature::Cubeness => "cubeness",
            Feature::FillAfter => "fill_after",
            Feature::Waste => "waste",
        }
    }
}

impl FromStr for Feature {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Feature::ALL.into_iter().find(|f| f.name() == s).ok_or(())
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Features {
    pub fn get(&self, f: Feature) -> f64 {
        match f {
            Feature::VolUtil => self.vol_util,
            Feature::Adjacency => self.adjacency,
            Feature::Quantity => self.quantity,
            Feature::HeightIncrease => self.height_increase,
            Feature::ContactArea => self.contact_area,
            Feature::Cubeness => self.cubeness,
            Feature::FillAfter => self.fill_after,
            Feature::Waste => self.waste,
        }
    }
}

fn interval_overlap(a0: f64, a_len: f64, b0: f64, b_len: f64) -> f64 {
    ((a0 + a_len).min(b0 + b_len) - a0.max(b0)).max(0.0)
}

/// Features of placing `dims` at `pos`. The placement is assumed valid.
pub fn extract_features(
    pos: Position,
    dims: Dims,
    container: Dims,
    state: &ContainerState,
    remaining_quantity: u32,
    tol: Tolerance,
) -> Features {
    let e = tol.epsilon;
    let near = |a: f64, b: f64| (a - b).abs() < e;
    let (l, w, h) = (dims.length, dims.width, dims.height);
    let cv = container.volume();
    let v = dims.volume();

    let walls = [
        (near(pos.x, 0.0), w * h),
        (near(pos.x + l, container.length), w * h),
        (near(pos.y, 0.0), l * h),
        (near(pos.y + w, container.width), l * h),
        (near(pos.z, 0.0), l * w),
        (near(pos.z + h, container.height), l * w),
    ];
    let mut adjacency = walls.iter().filter(|(hit, _)| *hit).count() as f64;
    let mut contact_area: f64 = walls.iter().filter(|(hit, _)| *hit).map(|(_, a)| a).sum();

    for b in &state.occupied {
        let (bp, bd) = (b.pos, b.dims);
        // Face-coordinate matches, counted with or without lateral overlap.
        let x_touch = near(pos.x + l, bp.x) || near(bp.x + bd.length, pos.x);
        let y_touch = near(pos.y + w, bp.y) || near(bp.y + bd.width, pos.y);
        let z_touch = near(pos.z + h, bp.z) || near(bp.z + bd.height, pos.z);
        adjacency += [
            near(pos.x + l, bp.x),
            near(pos.y + w, bp.y),
            near(pos.z + h, bp.z),
            near(bp.x + bd.length, pos.x),
            near(bp.y + bd.width, pos.y),
            near(bp.z + bd.height, pos.z),
        ]
        .iter()
        .filter(|&&hit| hit)
        .count() as f64;

        let ox = interval_overlap(pos.x, l, bp.x, bd.length);
        let oy = interval_overlap(pos.y, w, bp.y, bd.width);
        let oz = interval_overlap(pos.z, h, bp.z, bd.height);
        if x_touch {
            contact_area += oy * oz;
        }
        if y_touch {
            contact_area += ox * oz;
        }
        if z_touch {
            contact_area += ox * oy;
        }
    }

    let used_after = state.used_volume() + v;
    Features {
        vol_util: v / cv,
        adjacency,
        quantity: remaining_quantity as f64,
        height_increase: (pos.z + h - state.pack_height()).max(0.0),
        contact_area,
        cubeness: v / (l + w + h),
        fill_after: used_after / cv,
        waste: cv - used_after,
    }
}

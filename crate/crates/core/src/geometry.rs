//! Geometric and physical constraint checks for axis-aligned boxes.
//!
//! Everything here is a pure function on values. Callers that need speed
//! (the constructive solvers) build their own indexes on top of these
//! primitives instead of pushing state into this module.
//!
//! Conventions:
//!
//! * Positions are the back-bottom-left corner of a box.
//! * Overlap uses strict inequalities, so boxes sharing a face do not overlap.
//! * Bounds and support detection allow a slack of [`Tolerance::epsilon`].

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("orientation {0} is out of range (expected 0..=5)")]
    InvalidOrientation(i64),
    #[error("dimensions must be finite and strictly positive, got ({0}, {1}, {2})")]
    InvalidDims(f64, f64, f64),
    #[error("separation groups overlap on type id `{0}`")]
    OverlappingGroups(String),
    #[error("tolerance must be strictly positive, got {0}")]
    InvalidTolerance(f64),
}

/// Box or container extents along x (length), y (width) and z (height).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dims {
    pub length: f64,
    pub width: f64,
    pub height: f64,
}

impl Dims {
    pub fn new(length: f64, width: f64, height: f64) -> Result<Self, GeometryError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(length) && ok(width) && ok(height) {
            Ok(Self { length, width, height })
        } else {
            Err(GeometryError::InvalidDims(length, width, height))
        }
    }

    pub fn volume(&self) -> f64 {
        self.length * self.width * self.height
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.length, self.width, self.height]
    }

    /// Base (x-y footprint) area.
    pub fn base_area(&self) -> f64 {
        self.length * self.width
    }

    /// True when the box fits inside `container` without rotation.
    pub fn fits_in(&self, container: &Dims, tol: Tolerance) -> bool {
        self.length <= container.length + tol.epsilon
            && self.width <= container.width + tol.epsilon
            && self.height <= container.height + tol.epsilon
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.length, self.width, self.height)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// One of the six axis-aligned rotations of a box.
///
/// With base dimensions `(L, W, H)` the placed dimensions are:
///
/// | index | placed       |
/// |-------|--------------|
/// | 0     | `(L, W, H)`  |
/// | 1     | `(L, H, W)`  |
/// | 2     | `(W, L, H)`  |
/// | 3     | `(W, H, L)`  |
/// | 4     | `(H, L, W)`  |
/// | 5     | `(H, W, L)`  |
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Orientation(u8);

impl Orientation {
    pub const ALL: [Orientation; 6] = [
        Orientation(0),
        Orientation(1),
        Orientation(2),
        Orientation(3),
        Orientation(4),
        Orientation(5),
    ];

    pub fn new(index: i64) -> Result<Self, GeometryError> {
        if (0..6).contains(&index) {
            Ok(Orientation(index as u8))
        } else {
            Err(GeometryError::InvalidOrientation(index))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn apply(self, base: Dims) -> Dims {
        let Dims { length: l, width: w, height: h } = base;
        let (a, b, c) = match self.0 {
            0 => (l, w, h),
            1 => (l, h, w),
            2 => (w, l, h),
            3 => (w, h, l),
            4 => (h, l, w),
            _ => (h, w, l),
        };
        Dims { length: a, width: b, height: c }
    }
}

impl TryFrom<i64> for Orientation {
    type Error = GeometryError;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Orientation::new(value)
    }
}

impl From<Orientation> for u8 {
    fn from(o: Orientation) -> u8 {
        o.0
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub epsilon: f64,
}

impl Tolerance {
    pub fn new(epsilon: f64) -> Result<Self, GeometryError> {
        if epsilon > 0.0 && epsilon.is_finite() {
            Ok(Self { epsilon })
        } else {
            Err(GeometryError::InvalidTolerance(epsilon))
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { epsilon: 1e-6 }
    }
}

/// A box placed in a container. `dims` are the extents in the placed orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedBox {
    pub item_type_id: String,
    pub pos: Position,
    pub dims: Dims,
    pub orientation: Orientation,
}

impl PlacedBox {
    pub fn new(item_type_id: impl Into<String>, pos: Position, base: Dims, orientation: Orientation) -> Self {
        Self {
            item_type_id: item_type_id.into(),
            pos,
            dims: orientation.apply(base),
            orientation,
        }
    }

    pub fn top(&self) -> f64 {
        self.pos.z + self.dims.height
    }

    pub fn volume(&self) -> f64 {
        self.dims.volume()
    }
}

/// Placed dimensions of `base` under orientation index `orientation`.
pub fn orient(base: Dims, orientation: i64) -> Result<Dims, GeometryError> {
    Ok(Orientation::new(orientation)?.apply(base))
}

/// Strict open-interval intersection test on all three axes.
pub fn boxes_overlap(a_pos: Position, a_dims: Dims, b_pos: Position, b_dims: Dims) -> bool {
    a_pos.x < b_pos.x + b_dims.length
        && a_pos.x + a_dims.length > b_pos.x
        && a_pos.y < b_pos.y + b_dims.width
        && a_pos.y + a_dims.width > b_pos.y
        && a_pos.z < b_pos.z + b_dims.height
        && a_pos.z + a_dims.height > b_pos.z
}

pub fn within_bounds(pos: Position, dims: Dims, container: Dims, tol: Tolerance) -> bool {
    let e = tol.epsilon;
    pos.x >= -e
        && pos.x + dims.length <= container.length + e
        && pos.y >= -e
        && pos.y + dims.width <= container.width + e
        && pos.z >= -e
        && pos.z + dims.height <= container.height + e
}

fn interval_overlap(a0: f64, a_len: f64, b0: f64, b_len: f64) -> f64 {
    ((a0 + a_len).min(b0 + b_len) - a0.max(b0)).max(0.0)
}

/// Area of the intersection of the two x-y footprints.
pub fn overlap_area_xy(a: &PlacedBox, b: &PlacedBox) -> f64 {
    footprint_overlap(a.pos, a.dims, b.pos, b.dims)
}

pub(crate) fn footprint_overlap(a_pos: Position, a_dims: Dims, b_pos: Position, b_dims: Dims) -> f64 {
    interval_overlap(a_pos.x, a_dims.length, b_pos.x, b_dims.length)
        * interval_overlap(a_pos.y, a_dims.width, b_pos.y, b_dims.width)
}

/// Boxes whose top face lies at the item's base level (within epsilon) and
/// whose footprint overlaps the item's footprint with positive area.
pub fn support_set<'a>(item: &PlacedBox, others: &'a [PlacedBox], tol: Tolerance) -> Vec<&'a PlacedBox> {
    others
        .iter()
        .filter(|o| (o.top() - item.pos.z).abs() <= tol.epsilon && overlap_area_xy(item, o) > 0.0)
        .collect()
}

/// Total footprint area of `pos`/`dims` resting on boxes in `others`.
pub(crate) fn supported_area(pos: Position, dims: Dims, others: &[PlacedBox], tol: Tolerance) -> f64 {
    others
        .iter()
        .filter(|o| (o.top() - pos.z).abs() <= tol.epsilon)
        .map(|o| footprint_overlap(pos, dims, o.pos, o.dims))
        .sum()
}

/// Vertical stability: floor items are always stable; any other item needs
/// supported area of at least `alpha` times its base area.
pub fn is_stable(item: &PlacedBox, others: &[PlacedBox], alpha: f64, tol: Tolerance) -> bool {
    is_stable_at(item.pos, item.dims, others, alpha, tol)
}

pub(crate) fn is_stable_at(pos: Position, dims: Dims, others: &[PlacedBox], alpha: f64, tol: Tolerance) -> bool {
    debug_assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    if pos.z <= tol.epsilon {
        return true;
    }
    supported_area(pos, dims, others, tol) >= alpha * dims.base_area() - tol.epsilon
}

/// Bounds plus pairwise non-overlap. Stability and separation are separate checks.
pub fn is_valid_placement(pos: Position, dims: Dims, container: Dims, occupied: &[PlacedBox], tol: Tolerance) -> bool {
    within_bounds(pos, dims, container, tol)
        && !occupied.iter().any(|o| boxes_overlap(pos, dims, o.pos, o.dims))
}

/// False iff the container holds at least one type from each group.
pub fn separation_ok<'a, I>(
    container_type_ids: I,
    group_a: &BTreeSet<String>,
    group_b: &BTreeSet<String>,
) -> Result<bool, GeometryError>
where
    I: IntoIterator<Item = &'a str>,
{
    if let Some(shared) = group_a.intersection(group_b).next() {
        return Err(GeometryError::OverlappingGroups(shared.clone()));
    }
    let (mut has_a, mut has_b) = (false, false);
    for id in container_type_ids {
        has_a |= group_a.contains(id);
        has_b |= group_b.contains(id);
    }
    Ok(!(has_a && has_b))
}

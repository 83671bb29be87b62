//! Seeded synthetic instances for tests, oracles and smoke benchmarks.
//!
//! Container and item extents are drawn from the ranges observed in the
//! public benchmark set: containers 10–60 × 6–40 × 14–72, items
//! 2–40 × 4–32 × 4–35. All extents are integers.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Instance, ItemType};
use crate::geometry::Dims;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SynthProfile {
    /// At most five units and at most three container volumes of items, so
    /// exhaustive search stays cheap.
    Tiny,
    /// A handful of types with small quantities.
    Small,
    /// Dataset-like quantities (12–60 per type).
    Medium,
}

impl FromStr for SynthProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tiny" => Ok(Self::Tiny),
            "small" => Ok(Self::Small),
            "medium" => Ok(Self::Medium),
            other => Err(format!("unknown profile `{other}` (expected tiny, small or medium)")),
        }
    }
}

impl fmt::Display for SynthProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tiny => "tiny",
            Self::Small => "small",
            Self::Medium => "medium",
        })
    }
}

const CONTAINER_RANGE: [(u32, u32); 3] = [(10, 60), (6, 40), (14, 72)];
const ITEM_RANGE: [(u32, u32); 3] = [(2, 40), (4, 32), (4, 35)];

fn container(rng: &mut ChaCha8Rng) -> Dims {
    let [l, w, h] = CONTAINER_RANGE.map(|(lo, hi)| rng.gen_range(lo..=hi) as f64);
    Dims { length: l, width: w, height: h }
}

/// Shrinks `item` until its sorted extents fit under the sorted container
/// extents, which guarantees some orientation fits.
fn clamp_to_fit(mut item: [f64; 3], container: Dims) -> Dims {
    let mut c = container.as_array();
    c.sort_by(f64::total_cmp);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| item[a].total_cmp(&item[b]));
    for (rank, &axis) in order.iter().enumerate() {
        item[axis] = item[axis].min(c[rank]);
    }
    Dims { length: item[0], width: item[1], height: item[2] }
}

fn dataset_item(rng: &mut ChaCha8Rng, container: Dims) -> Dims {
    let raw = ITEM_RANGE.map(|(lo, hi)| rng.gen_range(lo..=hi) as f64);
    clamp_to_fit(raw, container)
}

fn tiny(rng: &mut ChaCha8Rng) -> (Dims, Vec<ItemType>) {
    let c = container(rng);
    let n_types = rng.gen_range(1..=3);
    let budget = 3.0 * c.volume();
    let mut volume = 0.0;
    let mut units = 0;
    let mut types = Vec::new();
    for k in 0..n_types {
        // Each extent between a quarter and three quarters of the container's.
        let raw = c.as_array().map(|e| {
            let lo = (0.25 * e).ceil().max(1.0) as u32;
            let hi = ((0.75 * e).floor() as u32).max(lo);
            rng.gen_range(lo..=hi) as f64
        });
        let base = Dims { length: raw[0], width: raw[1], height: raw[2] };
        let mut qty = rng.gen_range(1..=2u32);
        while qty > 0 && (units + qty > 5 || volume + qty as f64 * base.volume() > budget) {
            qty -= 1;
        }
        if qty == 0 {
            break;
        }
        units += qty;
        volume += qty as f64 * base.volume();
        types.push(ItemType::new(format!("t{}", k + 1), base, qty));
    }
    (c, types)
}

fn with_quantities(rng: &mut ChaCha8Rng, n_types: std::ops::RangeInclusive<usize>, qty: std::ops::RangeInclusive<u32>) -> (Dims, Vec<ItemType>) {
    let c = container(rng);
    let n = rng.gen_range(n_types);
    let types = (0..n)
        .map(|k| {
            let base = dataset_item(rng, c);
            ItemType::new(format!("t{}", k + 1), base, rng.gen_range(qty.clone()))
        })
        .collect();
    (c, types)
}

/// Deterministic instance for `(seed, profile)`.
pub fn synth_instance(seed: u64, profile: SynthProfile) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005e_ed0f_b0c5);
    let (container, item_types) = match profile {
        SynthProfile::Tiny => tiny(&mut rng),
        SynthProfile::Small => with_quantities(&mut rng, 2..=4, 2..=8),
        SynthProfile::Medium => with_quantities(&mut rng, 3..=5, 12..=60),
    };
    Instance::new(format!("synth-{profile}-{seed}"), container, item_types, None)
        .expect("synthetic instances are valid by construction")
}

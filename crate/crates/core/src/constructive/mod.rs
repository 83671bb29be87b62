//! Greedy constructive packing.
//!
//! A solve repeatedly lists every admissible placement (item type ×
//! orientation × corner point × container, plus the origin of one fresh
//! container), scores each with a pluggable [`Scorer`], and commits one
//! chosen through a restricted candidate list.

mod candidates;
mod features;
mod first_fit;
mod greedy;
mod rcl;
mod scoring;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, Dims, PlacedBox, Position, Tolerance};
use crate::instance::Separation;

pub use candidates::candidate_positions;
pub use features::{extract_features, Feature, Features};
pub use first_fit::first_fit_solve;
pub use greedy::{greedy_solve, SolveOptions};
pub use rcl::{rcl_select, rcl_threshold, PlacementDecision, RclError, Scored};
pub use scoring::{score_utilization, ConstantScorer, Scorer, UtilizationScorer};

/// Which side constraints a solve must respect.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstraintProfile {
    /// Required supported fraction of each base, in (0, 1].
    pub stability: Option<f64>,
    /// Keep the instance's separation groups apart.
    pub separation: bool,
}

impl ConstraintProfile {
    pub const BASE: ConstraintProfile = ConstraintProfile { stability: None, separation: false };

    pub fn new(stability: Option<f64>, separation: bool) -> Result<Self, ProfileError> {
        if let Some(a) = stability {
            if !(a > 0.0 && a <= 1.0) {
                return Err(ProfileError::Alpha(a));
            }
        }
        Ok(Self { stability, separation })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("stability fraction must lie in (0, 1], got {0}")]
    Alpha(f64),
    #[error("unknown regime `{0}` (expected base, stability, separation or both)")]
    UnknownRegime(String),
}

/// The four benchmark regimes. Stability uses full base support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Base,
    Stability,
    Separation,
    Both,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::Base, Regime::Stability, Regime::Separation, Regime::Both];

    pub fn profile(self) -> ConstraintProfile {
        match self {
            Regime::Base => ConstraintProfile::BASE,
            Regime::Stability => ConstraintProfile { stability: Some(1.0), separation: false },
            Regime::Separation => ConstraintProfile { stability: None, separation: true },
            Regime::Both => ConstraintProfile { stability: Some(1.0), separation: true },
        }
    }
}

impl FromStr for Regime {
    type Err = ProfileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base" => Ok(Regime::Base),
            "stability" => Ok(Regime::Stability),
            "separation" => Ok(Regime::Separation),
            "both" => Ok(Regime::Both),
            other => Err(ProfileError::UnknownRegime(other.to_string())),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Base => "base",
            Regime::Stability => "stability",
            Regime::Separation => "separation",
            Regime::Both => "both",
        })
    }
}

/// Contents of one open container.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainerState {
    pub index: usize,
    pub occupied: Vec<PlacedBox>,
    pub type_ids_present: BTreeSet<String>,
    used_volume: f64,
    pack_height: f64,
}

impl ContainerState {
    pub fn new(index: usize) -> Self {
        Self { index, occupied: Vec::new(), type_ids_present: BTreeSet::new(), used_volume: 0.0, pack_height: 0.0 }
    }

    /// Caller guarantees the box is admissible.
    pub fn place(&mut self, b: PlacedBox) {
        self.used_volume += b.volume();
        self.pack_height = self.pack_height.max(b.top());
        self.type_ids_present.insert(b.item_type_id.clone());
        self.occupied.push(b);
    }

    pub fn used_volume(&self) -> f64 {
        self.used_volume
    }

    /// Highest top face, 0 when empty.
    pub fn pack_height(&self) -> f64 {
        self.pack_height
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("deadline reached after placing {placed} of {total} units")]
    Timeout { placed: u64, total: u64 },
    #[error("solver invariant violated: {0}")]
    Invariant(String),
}

/// Whether a type may join a container under the separation rule.
pub(crate) fn separation_admits(state: &ContainerState, type_id: &str, groups: Option<&Separation>) -> bool {
    let Some(sep) = groups else { return true };
    if state.type_ids_present.contains(type_id) {
        return true;
    }
    let ids = state.type_ids_present.iter().map(String::as_str).chain(std::iter::once(type_id));
    geometry::separation_ok(ids, &sep.group_a, &sep.group_b).unwrap_or(false)
}

/// Geometry and stability check for one placement.
pub(crate) fn fits(
    state: &ContainerState,
    pos: Position,
    dims: Dims,
    container: Dims,
    alpha: Option<f64>,
    tol: Tolerance,
) -> bool {
    geometry::is_valid_placement(pos, dims, container, &state.occupied, tol)
        && alpha.is_none_or(|a| geometry::is_stable_at(pos, dims, &state.occupied, a, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes_parse_and_map() {
        for r in Regime::ALL {
            assert_eq!(r.to_string().parse::<Regime>().unwrap(), r);
        }
        assert_eq!(Regime::Both.profile(), ConstraintProfile { stability: Some(1.0), separation: true });
        assert!("tall".parse::<Regime>().is_err());
    }

    #[test]
    fn alpha_range() {
        assert!(ConstraintProfile::new(Some(1.0), false).is_ok());
        assert!(ConstraintProfile::new(Some(0.0), false).is_err());
        assert!(ConstraintProfile::new(Some(1.5), false).is_err());
        assert!(ConstraintProfile::new(Some(f64::NAN), false).is_err());
    }
}

//! Problem data: item types, the container, separation groups and packing plans.

mod io;
pub(crate) use io::{instance_from_value, instance_to_value};
mod synth;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Dims, Orientation, Position, Tolerance};

pub use io::{
    instance_to_string, load_dataset, load_instance, parse_instance, parse_solution, read_solution, solution_to_string,
    write_instance, write_solution,
};
pub use synth::{synth_instance, SynthProfile};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error("dataset too small: need at least {needed} instances, got {got}")]
    TooFewInstances { needed: usize, got: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl InstanceError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        InstanceError::Io { path: path.display().to_string(), source }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItemType {
    pub id: String,
    pub base: Dims,
    pub quantity: u32,
    /// Sorted, deduplicated, non-empty.
    pub allowed_orientations: Vec<Orientation>,
}

impl ItemType {
    /// An item type that may be placed in any of the six orientations.
    pub fn new(id: impl Into<String>, base: Dims, quantity: u32) -> Self {
        Self { id: id.into(), base, quantity, allowed_orientations: Orientation::ALL.to_vec() }
    }

    pub fn with_orientations(mut self, orientations: impl IntoIterator<Item = Orientation>) -> Self {
        let mut v: Vec<Orientation> = orientations.into_iter().collect();
        v.sort();
        v.dedup();
        self.allowed_orientations = v;
        self
    }

    pub fn volume(&self) -> f64 {
        self.base.volume()
    }

    pub fn allows(&self, o: Orientation) -> bool {
        self.allowed_orientations.contains(&o)
    }

    /// Allowed orientations whose placed dims fit an empty container.
    pub fn fitting_orientations(&self, container: &Dims, tol: Tolerance) -> impl Iterator<Item = Orientation> + '_ {
        let container = *container;
        self.allowed_orientations
            .iter()
            .copied()
            .filter(move |o| o.apply(self.base).fits_in(&container, tol))
    }
}

/// Two disjoint groups of item type ids that may never share a container.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub group_a: BTreeSet<String>,
    pub group_b: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub container: Dims,
    pub item_types: Vec<ItemType>,
    /// Explicit groups from the source document, if any.
    pub separation: Option<Separation>,
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        container: Dims,
        item_types: Vec<ItemType>,
        separation: Option<Separation>,
    ) -> Result<Self, InstanceError> {
        let inst = Self { name: name.into(), container, item_types, separation };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        let tol = Tolerance::default();
        let mut seen = BTreeSet::new();
        for t in &self.item_types {
            if !seen.insert(t.id.as_str()) {
                return Err(InstanceError::Validation(format!("duplicate item type id `{}`", t.id)));
            }
            if t.allowed_orientations.is_empty() {
                return Err(InstanceError::Validation(format!("item type `{}` has no allowed orientation", t.id)));
            }
            if t.fitting_orientations(&self.container, tol).next().is_none() {
                return Err(InstanceError::Validation(format!(
                    "item type `{}` {} does not fit container {} in any allowed orientation",
                    t.id, t.base, self.container
                )));
            }
        }
        if let Some(sep) = &self.separation {
            if let Some(shared) = sep.group_a.intersection(&sep.group_b).next() {
                return Err(InstanceError::Validation(format!("separation groups share type `{shared}`")));
            }
            for id in sep.group_a.iter().chain(&sep.group_b) {
                if !seen.contains(id.as_str()) {
                    return Err(InstanceError::Validation(format!("separation group names unknown type `{id}`")));
                }
            }
        }
        Ok(())
    }

    pub fn type_index(&self, id: &str) -> Option<usize> {
        self.item_types.iter().position(|t| t.id == id)
    }

    pub fn item_type(&self, id: &str) -> Option<&ItemType> {
        self.item_types.iter().find(|t| t.id == id)
    }

    /// Groups used when the separation regime is active: the explicit groups,
    /// or else the first two item types against each other.
    pub fn separation_groups(&self) -> Option<Separation> {
        if let Some(sep) = &self.separation {
            return Some(sep.clone());
        }
        match self.item_types.as_slice() {
            [a, b, ..] => Some(Separation {
                group_a: BTreeSet::from([a.id.clone()]),
                group_b: BTreeSet::from([b.id.clone()]),
            }),
            _ => None,
        }
    }

    pub fn demands(&self) -> BTreeMap<String, u32> {
        self.item_types.iter().map(|t| (t.id.clone(), t.quantity)).collect()
    }

    pub fn total_units(&self) -> u64 {
        self.item_types.iter().map(|t| t.quantity as u64).sum()
    }

    pub fn total_item_volume(&self) -> f64 {
        self.item_types.iter().map(|t| t.volume() * t.quantity as f64).sum()
    }
}

/// One placed unit of a packing plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub container_index: usize,
    pub item_type_id: String,
    #[serde(flatten)]
    pub pos: Position,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub instance_name: String,
    pub containers_used: usize,
    pub placements: Vec<Placement>,
}

impl Solution {
    pub fn empty(instance_name: impl Into<String>) -> Self {
        Self { instance_name: instance_name.into(), containers_used: 0, placements: Vec::new() }
    }

    /// Builds a solution whose container count is derived from the placements.
    pub fn from_placements(instance_name: impl Into<String>, placements: Vec<Placement>) -> Self {
        let containers_used = placements.iter().map(|p| p.container_index + 1).max().unwrap_or(0);
        Self { instance_name: instance_name.into(), containers_used, placements }
    }

    pub fn counts_by_type(&self) -> BTreeMap<&str, u32> {
        let mut out = BTreeMap::new();
        for p in &self.placements {
            *out.entry(p.item_type_id.as_str()).or_insert(0) += 1;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train: Vec<Instance>,
    pub test: Vec<Instance>,
}

/// Number of leading instances used for training.
pub const TRAIN_SIZE: usize = 20;

/// The first [`TRAIN_SIZE`] instances train, the rest test.
pub fn split_dataset(mut instances: Vec<Instance>) -> Result<DatasetSplit, InstanceError> {
    if instances.len() <= TRAIN_SIZE {
        return Err(InstanceError::TooFewInstances { needed: TRAIN_SIZE + 1, got: instances.len() });
    }
    let test = instances.split_off(TRAIN_SIZE);
    Ok(DatasetSplit { train: instances, test })
}

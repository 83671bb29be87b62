//! JSON documents for instances and solutions.
//!
//! Instance document:
//!
//! ```json
//! {
//!   "name": "example",
//!   "container": { "length": 20, "width": 15, "height": 20 },
//!   "item_types": [
//!     { "id": "t1", "length": 8, "width": 6, "height": 10, "quantity": 12,
//!       "allowed_orientations": [0, 1, 2, 3, 4, 5] }
//!   ],
//!   "separation": { "group_a": ["t1"], "group_b": ["t2"] }
//! }
//! ```
//!
//! `name` defaults to the file stem, `allowed_orientations` to all six, and
//! `separation` is optional.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Instance, InstanceError, ItemType, Separation, Solution};
use crate::geometry::{Dims, Orientation};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContainerDoc {
    length: f64,
    width: f64,
    height: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemTypeDoc {
    id: String,
    length: f64,
    width: f64,
    height: f64,
    quantity: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    allowed_orientations: Option<Vec<i64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    container: ContainerDoc,
    item_types: Vec<ItemTypeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    separation: Option<Separation>,
}

fn parse_error(e: serde_json::Error) -> InstanceError {
    InstanceError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

fn dims(field: &str, l: f64, w: f64, h: f64) -> Result<Dims, InstanceError> {
    Dims::new(l, w, h).map_err(|e| InstanceError::Validation(format!("{field}: {e}")))
}

/// Parses and validates an instance document. `default_name` is used when the
/// document has no `name`.
pub fn parse_instance(text: &str, default_name: &str) -> Result<Instance, InstanceError> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(parse_error)?;
    let container = dims("container", doc.container.length, doc.container.width, doc.container.height)?;
    let mut item_types = Vec::with_capacity(doc.item_types.len());
    for (i, t) in doc.item_types.into_iter().enumerate() {
        let base = dims(&format!("item_types[{i}] (`{}`)", t.id), t.length, t.width, t.height)?;
        let mut item = ItemType::new(t.id, base, t.quantity);
        if let Some(list) = t.allowed_orientations {
            let parsed = list
                .into_iter()
                .map(Orientation::new)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| InstanceError::Validation(format!("item_types[{i}].allowed_orientations: {e}")))?;
            item = item.with_orientations(parsed);
        }
        item_types.push(item);
    }
    Instance::new(doc.name.unwrap_or_else(|| default_name.to_string()), container, item_types, doc.separation)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, InstanceError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| InstanceError::io(path, e))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
    parse_instance(&text, stem)
}

fn instance_doc(inst: &Instance) -> InstanceDoc {
    InstanceDoc {
        name: Some(inst.name.clone()),
        container: ContainerDoc {
            length: inst.container.length,
            width: inst.container.width,
            height: inst.container.height,
        },
        item_types: inst
            .item_types
            .iter()
            .map(|t| ItemTypeDoc {
                id: t.id.clone(),
                length: t.base.length,
                width: t.base.width,
                height: t.base.height,
                quantity: t.quantity,
                allowed_orientations: Some(t.allowed_orientations.iter().map(|o| o.index() as i64).collect()),
            })
            .collect(),
        separation: inst.separation.clone(),
    }
}

/// JSON value of the instance document, for embedding in other files.
pub(crate) fn instance_to_value(inst: &Instance) -> serde_json::Value {
    serde_json::to_value(instance_doc(inst)).expect("instance serializes")
}

pub(crate) fn instance_from_value(value: serde_json::Value) -> Result<Instance, InstanceError> {
    parse_instance(&value.to_string(), "embedded")
}

pub fn instance_to_string(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&instance_doc(inst)).expect("instance serializes");
    s.push('\n');
    s
}

pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<(), InstanceError> {
    let path = path.as_ref();
    fs::write(path, instance_to_string(inst)).map_err(|e| InstanceError::io(path, e))
}

/// Loads every `*.json` instance in `dir`, ordered by file name.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Vec<Instance>, InstanceError> {
    let dir = dir.as_ref();
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| InstanceError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    paths.iter().map(load_instance).collect()
}

pub fn solution_to_string(sol: &Solution) -> String {
    let mut s = serde_json::to_string_pretty(sol).expect("solution serializes");
    s.push('\n');
    s
}

pub fn parse_solution(text: &str) -> Result<Solution, InstanceError> {
    let sol: Solution = serde_json::from_str(text).map_err(parse_error)?;
    let derived = sol.placements.iter().map(|p| p.container_index + 1).max().unwrap_or(0);
    if derived != sol.containers_used {
        return Err(InstanceError::Validation(format!(
            "containers_used is {} but placements reference {} containers",
            sol.containers_used, derived
        )));
    }
    Ok(sol)
}

pub fn write_solution(sol: &Solution, path: impl AsRef<Path>) -> Result<(), InstanceError> {
    let path = path.as_ref();
    fs::write(path, solution_to_string(sol)).map_err(|e| InstanceError::io(path, e))
}

pub fn read_solution(path: impl AsRef<Path>) -> Result<Solution, InstanceError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| InstanceError::io(path, e))?;
    parse_solution(&text)
}

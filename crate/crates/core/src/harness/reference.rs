//! Published reference totals and comparison against them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::bench::{BenchmarkResult, Split};
use crate::constructive::Regime;

const BUNDLED: &str = include_str!("../../data/reference.toml");

/// Largest gap between `total` and `train + test` on averaged rows.
const ROUNDING_SLACK: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub regime: Regime,
    pub method: String,
    pub train: f64,
    pub test: f64,
    pub total: f64,
    #[serde(default)]
    pub averaged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTable {
    pub train_instances: usize,
    pub test_instances: usize,
    #[serde(rename = "row")]
    pub rows: Vec<ReferenceRow>,
}

#[derive(Debug, Error)]
pub enum ReferenceError {
    #[error("reference table: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("reference row `{method}` ({regime}): total {total} differs from train + test = {sum}")]
    Inconsistent { regime: Regime, method: String, total: f64, sum: f64 },
    #[error("result covers {got_train} train and {got_test} test instances; the reference covers {want_train} and {want_test}")]
    InstanceMismatch { got_train: usize, got_test: usize, want_train: usize, want_test: usize },
    #[error("no reference row `{0}` for regime {1}")]
    MissingRow(String, Regime),
    #[error("per-instance reference: {0}")]
    PerInstance(String),
}

impl ReferenceTable {
    pub fn bundled() -> Self {
        Self::from_toml(BUNDLED).expect("bundled reference table is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, ReferenceError> {
        let t: ReferenceTable = toml::from_str(text)?;
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), ReferenceError> {
        for r in &self.rows {
            let sum = r.train + r.test;
            let slack = if r.averaged { ROUNDING_SLACK + 1e-9 } else { 1e-9 };
            if (r.total - sum).abs() > slack {
                return Err(ReferenceError::Inconsistent { regime: r.regime, method: r.method.clone(), total: r.total, sum });
            }
        }
        Ok(())
    }

    pub fn rows_for(&self, regime: Regime) -> impl Iterator<Item = &ReferenceRow> {
        self.rows.iter().filter(move |r| r.regime == regime)
    }

    pub fn find(&self, regime: Regime, method: &str) -> Result<&ReferenceRow, ReferenceError> {
        self.rows_for(regime)
            .find(|r| r.method == method)
            .ok_or_else(|| ReferenceError::MissingRow(method.to_string(), regime))
    }
}

/// Per-instance container counts, read from `instance,containers` CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PerInstanceReference(pub BTreeMap<String, f64>);

impl PerInstanceReference {
    pub fn from_csv(text: &str) -> Result<Self, ReferenceError> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let mut out = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| ReferenceError::PerInstance(e.to_string()))?;
            let (Some(name), Some(count)) = (rec.get(0), rec.get(1)) else {
                return Err(ReferenceError::PerInstance("expected two columns".into()));
            };
            let v: f64 = count.trim().parse().map_err(|_| ReferenceError::PerInstance(format!("bad count `{count}`")))?;
            out.insert(name.trim().to_string(), v);
        }
        Ok(Self(out))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowComparison {
    pub method: String,
    pub reference_total: f64,
    pub delta: f64,
    /// `delta / reference_total`.
    pub relative: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceDelta {
    pub name: String,
    pub reference: f64,
    pub mean: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub regime: Regime,
    pub total: f64,
    pub train: f64,
    pub test: f64,
    pub tolerance: f64,
    pub rows: Vec<RowComparison>,
    pub instances: Vec<InstanceDelta>,
}

impl Comparison {
    pub fn row(&self, method: &str) -> Option<&RowComparison> {
        self.rows.iter().find(|r| r.method == method)
    }
}

/// Relative deltas of the result's mean total against every row of `regime`;
/// a row passes when `|delta| <= tolerance * reference`.
pub fn compare_to_reference(
    result: &BenchmarkResult,
    table: &ReferenceTable,
    regime: Regime,
    tolerance: f64,
    per_instance: Option<&PerInstanceReference>,
) -> Result<Comparison, ReferenceError> {
    let got_train = result.instances.iter().filter(|r| r.split == Split::Train).count();
    let got_test = result.instances.len() - got_train;
    if got_train != table.train_instances || got_test != table.test_instances {
        return Err(ReferenceError::InstanceMismatch {
            got_train,
            got_test,
            want_train: table.train_instances,
            want_test: table.test_instances,
        });
    }
    let total = result.total.mean;
    let rows = table
        .rows_for(regime)
        .map(|r| {
            let delta = total - r.total;
            let relative = delta / r.total;
            RowComparison {
                method: r.method.clone(),
                reference_total: r.total,
                delta,
                relative,
                pass: relative.abs() <= tolerance + 1e-12,
            }
        })
        .collect();
    let mut instances = Vec::new();
    if let Some(refs) = per_instance {
        for ir in &result.instances {
            let Some(&reference) = refs.0.get(&ir.name) else {
                return Err(ReferenceError::PerInstance(format!("no reference for instance `{}`", ir.name)));
            };
            let mean = ir.containers.iter().sum::<usize>() as f64 / ir.containers.len().max(1) as f64;
            instances.push(InstanceDelta { name: ir.name.clone(), reference, mean, delta: mean - reference });
        }
    }
    Ok(Comparison {
        regime,
        total,
        train: result.train.mean,
        test: result.test.mean,
        tolerance,
        rows,
        instances,
    })
}

//! Verification, benchmark runs and comparison with published totals.

mod bench;
mod config;
mod reference;
mod report;
mod verify;

pub use crate::constructive::Regime;
pub use bench::{
    run_benchmark, BenchError, BenchOptions, BenchmarkResult, InstanceResult, Method, ScoringRule, Split, Stat, Totals,
};
pub use config::{BenchConfig, ConfigError, MethodConfig, MethodKind, ScorerKind};
pub use reference::{
    compare_to_reference, Comparison, InstanceDelta, PerInstanceReference, ReferenceError, ReferenceRow, ReferenceTable,
    RowComparison,
};
pub use report::{results_csv, summary_table};
pub use verify::{verify_solution, verify_with, VerificationReport, Violation, ViolationKind};

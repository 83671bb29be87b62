//! CSV and plain-text benchmark reports.

use std::fmt::Write as _;

use super::bench::{BenchmarkResult, Split};
use super::reference::Comparison;

/// One row per instance and seed: `instance,split,seed,containers,seconds`.
pub fn results_csv(result: &BenchmarkResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["instance", "split", "seed", "containers", "seconds"]).expect("in-memory write");
    for r in &result.instances {
        let split = match r.split {
            Split::Train => "train",
            Split::Test => "test",
        };
        for (k, &seed) in result.seeds.iter().enumerate() {
            w.write_record([
                r.name.as_str(),
                split,
                &seed.to_string(),
                &r.containers[k].to_string(),
                &format!("{:.3}", r.seconds[k]),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

fn stat(s: super::bench::Stat, seeds: usize) -> String {
    if seeds > 1 {
        format!("{:.1} ± {:.2}", s.mean, s.std)
    } else {
        format!("{:.0}", s.mean)
    }
}

pub fn summary_table(result: &BenchmarkResult, comparison: Option<&Comparison>) -> String {
    let n = result.seeds.len();
    let mut out = String::new();
    let _ = writeln!(out, "method:  {}", result.method);
    let _ = writeln!(
        out,
        "profile: stability={} separation={}",
        result.profile.stability.map_or("off".to_string(), |a| a.to_string()),
        result.profile.separation
    );
    let _ = writeln!(out, "seeds:   {:?}", result.seeds);
    let _ = writeln!(out, "{:<10} {:>16}", "split", "containers");
    let _ = writeln!(out, "{:<10} {:>16}", "train", stat(result.train, n));
    let _ = writeln!(out, "{:<10} {:>16}", "test", stat(result.test, n));
    let _ = writeln!(out, "{:<10} {:>16}", "total", stat(result.total, n));
    if let Some(c) = comparison {
        let _ = writeln!(out, "\nreference ({}, tolerance {:.1}%):", c.regime, 100.0 * c.tolerance);
        let _ = writeln!(out, "{:<36} {:>9} {:>9} {:>8}  verdict", "method", "reference", "delta", "rel");
        for r in &c.rows {
            let _ = writeln!(
                out,
                "{:<36} {:>9.1} {:>+9.1} {:>+7.2}%  {}",
                r.method,
                r.reference_total,
                r.delta,
                100.0 * r.relative,
                if r.pass { "within" } else { "outside" }
            );
        }
        if !c.instances.is_empty() {
            let _ = writeln!(out, "\nper instance (mean - reference):");
            for d in &c.instances {
                let _ = writeln!(out, "  {:<24} {:>7.2} {:>7.1} {:>+7.2}", d.name, d.mean, d.reference, d.delta);
            }
        }
    }
    out
}

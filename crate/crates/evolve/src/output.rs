//! Run artifacts: JSONL records, trajectory CSV, robustness table.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::engine::{EvolutionOutcome, Record, TrajectoryPoint};

pub fn write_records(path: &Path, records: &[Record]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn write_trajectory(path: &Path, points: &[TrajectoryPoint]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for p in points {
        w.serialize(p)?;
    }
    w.flush()
}

/// Reads the best-fitness column back from a trajectory CSV.
pub fn read_best_fitness(path: &Path) -> io::Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let col = headers
        .iter()
        .position(|h| h == "best_fitness")
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "no best_fitness column"))?;
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        let v = row[col].parse().map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{e}")))?;
        out.push(v);
    }
    Ok(out)
}

/// Writes `records.jsonl`, `trajectory.csv`, `robustness.txt` and
/// `best.score` into `dir`, creating it if needed.
pub fn write_outcome(dir: &Path, out: &EvolutionOutcome) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    write_records(&dir.join("records.jsonl"), &out.records)?;
    write_trajectory(&dir.join("trajectory.csv"), &out.trajectory)?;
    fs::write(dir.join("robustness.txt"), out.robustness.to_string())?;
    let best = out.best().program.as_ref().expect("population members are valid");
    fs::write(dir.join("best.score"), format!("{}\n", best.serialize()))
}

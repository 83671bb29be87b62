//! Text export of the master problem in CPLEX LP format.
//!
//! ```text
//! \ comment lines name the instance and map rows to item types
//! Minimize
//!  obj: x0 + x1 + x2
//! Subject To
//!  cover_0: 2 x0 + x2 >= 3        (one row per demanded type, `=` in exact mode)
//! Bounds
//!  x0 >= 0
//! Generals
//!  x0 x1 x2
//! End
//! ```
//!
//! Variable `x<k>` is the multiplicity of pool pattern `k`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Pool, SpError, SpMode};
use crate::instance::InstanceError;

const TERMS_PER_LINE: usize = 8;

fn comment_safe(s: &str) -> String {
    s.chars().map(|c| if c.is_control() { ' ' } else { c }).collect()
}

fn push_terms(out: &mut String, terms: &[String]) {
    for (k, t) in terms.iter().enumerate() {
        if k > 0 {
            out.push_str(if k % TERMS_PER_LINE == 0 { "\n   + " } else { " + " });
        }
        out.push_str(t);
    }
}

pub fn lp_string(pool: &Pool, demands: &BTreeMap<String, u32>, mode: SpMode) -> String {
    let n = pool.patterns.len();
    let mut out = String::new();
    let _ = writeln!(out, "\\ Pattern selection master for instance {}", comment_safe(&pool.instance.name));
    let rows: Vec<(&String, u32)> = demands.iter().map(|(k, &d)| (k, d)).filter(|&(_, d)| d > 0).collect();
    for (i, (id, _)) in rows.iter().enumerate() {
        let _ = writeln!(out, "\\ cover_{i}: item type {}", comment_safe(id));
    }
    out.push_str("Minimize\n obj: ");
    let vars: Vec<String> = (0..n).map(|p| format!("x{p}")).collect();
    if vars.is_empty() {
        out.push_str("0 x0");
    } else {
        push_terms(&mut out, &vars);
    }
    out.push_str("\nSubject To\n");
    let sense = match mode {
        SpMode::Cover => ">=",
        SpMode::Exact => "=",
    };
    for (i, (id, d)) in rows.iter().enumerate() {
        let terms: Vec<String> = pool
            .patterns
            .iter()
            .enumerate()
            .filter_map(|(p, pat)| match pat.count(id) {
                0 => None,
                1 => Some(format!("x{p}")),
                c => Some(format!("{c} x{p}")),
            })
            .collect();
        let _ = write!(out, " cover_{i}: ");
        if terms.is_empty() {
            out.push_str("0 x0");
        } else {
            push_terms(&mut out, &terms);
        }
        let _ = writeln!(out, " {sense} {d}");
    }
    out.push_str("Bounds\n");
    for v in &vars {
        let _ = writeln!(out, " {v} >= 0");
    }
    out.push_str("Generals\n");
    for chunk in vars.chunks(TERMS_PER_LINE) {
        let _ = writeln!(out, " {}", chunk.join(" "));
    }
    out.push_str("End\n");
    out
}

pub fn export_lp(pool: &Pool, demands: &BTreeMap<String, u32>, mode: SpMode, path: impl AsRef<Path>) -> Result<(), SpError> {
    let path = path.as_ref();
    fs::write(path, lp_string(pool, demands, mode)).map_err(|e| InstanceError::io(path, e).into())
}

//! Depth-first branch and bound over pattern multiplicities.
//!
//! Each node picks the uncovered type with the fewest usable patterns and
//! branches on those patterns: child j takes pattern j and forbids patterns
//! 1..j-1 in its subtree, so every multiset is reached exactly once.

use std::time::Instant;

use serde::{Deserialize, Serialize};

/// `Cover` requires at least the demand; `Exact` requires equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpMode {
    #[default]
    Cover,
    Exact,
}

/// A master problem over count vectors. `columns[p][i]` is the count of
/// type `i` in pattern `p`.
#[derive(Debug, Clone)]
pub struct CountProblem {
    pub columns: Vec<Vec<u32>>,
    pub demand: Vec<u32>,
    /// Unit volume per type.
    pub volumes: Vec<f64>,
    pub container_volume: f64,
    pub mode: SpMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountSolution {
    /// Multiplicity per column.
    pub multiplicities: Vec<u32>,
    pub total: u32,
    pub optimal: bool,
    pub nodes: u64,
}

fn ceil_ratio(a: f64, b: f64) -> u32 {
    if a <= 0.0 {
        0
    } else {
        (a / b - 1e-9).ceil().max(0.0) as u32
    }
}

struct Search<'a> {
    cols: &'a [Vec<u32>],
    volumes: &'a [f64],
    container_volume: f64,
    mode: SpMode,
    best: u32,
    best_x: Option<Vec<u32>>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl Search<'_> {
    fn usable(&self, p: usize, r: &[u32]) -> bool {
        match self.mode {
            SpMode::Cover => true,
            SpMode::Exact => self.cols[p].iter().zip(r).all(|(c, r)| c <= r),
        }
    }

    fn useful_volume(&self, p: usize, r: &[u32]) -> f64 {
        self.cols[p].iter().zip(r).zip(self.volumes).map(|((&c, &r), v)| c.min(r) as f64 * v).sum()
    }

    fn lower_bound(&self, r: &[u32], allowed: &[bool]) -> u32 {
        let residual: f64 = r.iter().zip(self.volumes).map(|(&r, v)| r as f64 * v).sum();
        let mut by_volume = ceil_ratio(residual, self.container_volume);
        let best_use = (0..self.cols.len())
            .filter(|&p| allowed[p] && self.usable(p, r))
            .map(|p| self.useful_volume(p, r))
            .fold(0.0, f64::max);
        if best_use <= 0.0 {
            return u32::MAX;
        }
        by_volume = by_volume.max(ceil_ratio(residual, best_use));
        let mut by_count = 0;
        for (i, &ri) in r.iter().enumerate().filter(|(_, &ri)| ri > 0) {
            let most = (0..self.cols.len())
                .filter(|&p| allowed[p] && self.usable(p, r))
                .map(|p| self.cols[p][i].min(ri))
                .max()
                .unwrap_or(0);
            if most == 0 {
                return u32::MAX;
            }
            by_count = by_count.max(ri.div_ceil(most));
        }
        by_volume.max(by_count)
    }

    fn dfs(&mut self, r: &mut [u32], allowed: &mut [bool], x: &mut [u32], used: u32) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        if r.iter().all(|&v| v == 0) {
            if used < self.best {
                self.best = used;
                self.best_x = Some(x.to_vec());
            }
            return;
        }
        let lb = self.lower_bound(r, allowed);
        if lb == u32::MAX || used.saturating_add(lb) >= self.best {
            return;
        }
        let branch_type = r
            .iter()
            .enumerate()
            .filter(|(_, &ri)| ri > 0)
            .map(|(i, _)| {
                let n = (0..self.cols.len()).filter(|&p| allowed[p] && self.cols[p][i] > 0 && self.usable(p, r)).count();
                (n, i)
            })
            .min()
            .map(|(_, i)| i)
            .expect("some residual is positive");
        let mut cands: Vec<usize> =
            (0..self.cols.len()).filter(|&p| allowed[p] && self.cols[p][branch_type] > 0 && self.usable(p, r)).collect();
        let keys: Vec<f64> = cands.iter().map(|&p| self.useful_volume(p, r)).collect();
        let mut order: Vec<usize> = (0..cands.len()).collect();
        order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]).then(cands[a].cmp(&cands[b])));
        cands = order.into_iter().map(|k| cands[k]).collect();

        let saved = r.to_vec();
        for &p in &cands {
            for (ri, &c) in r.iter_mut().zip(&self.cols[p]) {
                *ri = ri.saturating_sub(c);
            }
            x[p] += 1;
            self.dfs(r, allowed, x, used + 1);
            x[p] -= 1;
            r.copy_from_slice(&saved);
            allowed[p] = false;
            if self.timed_out {
                break;
            }
        }
        for &p in &cands {
            allowed[p] = true;
        }
    }
}

/// Repeatedly takes the column with the most useful volume.
fn greedy_incumbent(s: &Search<'_>, demand: &[u32]) -> Option<Vec<u32>> {
    let mut r = demand.to_vec();
    let mut x = vec![0; s.cols.len()];
    while r.iter().any(|&v| v > 0) {
        let p = (0..s.cols.len())
            .filter(|&p| s.usable(p, &r) && s.useful_volume(p, &r) > 0.0)
            .max_by(|&a, &b| s.useful_volume(a, &r).total_cmp(&s.useful_volume(b, &r)).then(b.cmp(&a)))?;
        for (ri, &c) in r.iter_mut().zip(&s.cols[p]) {
            *ri = ri.saturating_sub(c);
        }
        x[p] += 1;
    }
    Some(x)
}

fn feasible(problem: &CountProblem, x: &[u32]) -> bool {
    (0..problem.demand.len()).all(|i| {
        let got: u64 = problem.columns.iter().zip(x).map(|(c, &m)| c[i] as u64 * m as u64).sum();
        match problem.mode {
            SpMode::Cover => got >= problem.demand[i] as u64,
            SpMode::Exact => got == problem.demand[i] as u64,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoSolution {
    Infeasible,
    /// The deadline passed before any feasible multiset was found.
    TimedOut,
}

/// Minimum number of columns meeting the demand. `hints` are known feasible
/// multiplicity vectors used as starting incumbents.
pub fn solve_counts(
    problem: &CountProblem,
    hints: &[Vec<u32>],
    deadline: Option<Instant>,
) -> Result<CountSolution, NoSolution> {
    let m = problem.demand.len();
    let n = problem.columns.len();
    // Covering: counts above demand are worthless, and a column whose capped
    // counts are dominated by another's is never needed.
    let mut keep: Vec<usize> = (0..n).collect();
    let capped: Vec<Vec<u32>> = match problem.mode {
        SpMode::Cover => {
            let capped: Vec<Vec<u32>> =
                problem.columns.iter().map(|c| c.iter().zip(&problem.demand).map(|(&c, &d)| c.min(d)).collect()).collect();
            keep.retain(|&p| {
                !(0..n).any(|q| {
                    q != p
                        && capped[q].iter().zip(&capped[p]).all(|(a, b)| a >= b)
                        && (capped[q] != capped[p] || q < p)
                })
            });
            keep.iter().map(|&p| capped[p].clone()).collect()
        }
        SpMode::Exact => problem.columns.clone(),
    };
    let mut search = Search {
        cols: &capped,
        volumes: &problem.volumes,
        container_volume: problem.container_volume,
        mode: problem.mode,
        best: u32::MAX,
        best_x: None,
        nodes: 0,
        deadline,
        timed_out: false,
    };
    let lift = |x: &[u32]| {
        let mut full = vec![0; n];
        for (k, &p) in keep.iter().enumerate() {
            full[p] = x[k];
        }
        full
    };
    let mut incumbents: Vec<Vec<u32>> = hints.iter().filter(|h| h.len() == n && feasible(problem, h)).cloned().collect();
    if let Some(g) = greedy_incumbent(&search, &problem.demand) {
        incumbents.push(lift(&g));
    }
    let mut best_full: Option<Vec<u32>> = None;
    for h in incumbents {
        let total: u32 = h.iter().sum();
        if total < search.best {
            search.best = total;
            best_full = Some(h);
        }
    }

    let mut r = problem.demand.clone();
    let mut allowed = vec![true; capped.len()];
    let mut x = vec![0; capped.len()];
    if m > 0 {
        search.dfs(&mut r, &mut allowed, &mut x, 0);
    } else {
        search.best = 0;
        best_full = Some(vec![0; n]);
    }
    if let Some(bx) = &search.best_x {
        best_full = Some(lift(bx));
    }
    let Some(multiplicities) = best_full else {
        return Err(if search.timed_out { NoSolution::TimedOut } else { NoSolution::Infeasible });
    };
    Ok(CountSolution {
        total: multiplicities.iter().sum(),
        multiplicities,
        optimal: !search.timed_out,
        nodes: search.nodes,
    })
}

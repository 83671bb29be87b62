//! The greedy construction loop.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::rcl::check_beta;
use super::{
    candidate_positions, extract_features, fits, rcl_select, separation_admits, ConstraintProfile, ContainerState,
    Features, PlacementDecision, Scored, Scorer, SolveError,
};
use crate::geometry::{Orientation, PlacedBox, Position, Tolerance};
use crate::instance::{Instance, Placement, Solution};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// RCL width in [0, 1]; 0 is deterministic.
    pub beta: f64,
    pub seed: u64,
    pub deadline: Option<Instant>,
    pub tol: Tolerance,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { beta: 0.0, seed: 0, deadline: None, tol: Tolerance::default() }
    }
}

impl SolveOptions {
    pub fn randomized(beta: f64, seed: u64) -> Self {
        Self { beta, seed, ..Self::default() }
    }

    /// Deadline `limit` from now.
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.deadline = Some(Instant::now() + limit);
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct Geo {
    pos: Position,
    orientation: Orientation,
    /// `quantity` is filled in at scoring time.
    features: Features,
}

/// Admissible placements of one type in one container, with scores valid
/// for `scored_qty` remaining units.
#[derive(Debug)]
struct Cell {
    geo: Vec<Geo>,
    scores: Vec<f64>,
    scored_qty: Option<u32>,
}

impl Cell {
    fn rescore(&mut self, qty: u32, scorer: &dyn Scorer) {
        if self.scored_qty == Some(qty) {
            return;
        }
        self.scores.clear();
        self.scores.extend(self.geo.iter().map(|g| {
            let mut f = g.features;
            f.quantity = qty as f64;
            scorer.score(&f)
        }));
        self.scored_qty = Some(qty);
    }
}

struct Ctx<'a> {
    inst: &'a Instance,
    profile: ConstraintProfile,
    groups: Option<crate::instance::Separation>,
    tol: Tolerance,
}

impl Ctx<'_> {
    fn build_cell(&self, state: &ContainerState, t: usize) -> Cell {
        let item = &self.inst.item_types[t];
        let mut geo = Vec::new();
        if separation_admits(state, &item.id, self.groups.as_ref()) {
            for &o in &item.allowed_orientations {
                let dims = o.apply(item.base);
                for pos in candidate_positions(state, dims, self.inst.container, self.tol) {
                    if fits(state, pos, dims, self.inst.container, self.profile.stability, self.tol) {
                        let features = extract_features(pos, dims, self.inst.container, state, 0, self.tol);
                        geo.push(Geo { pos, orientation: o, features });
                    }
                }
            }
        }
        Cell { geo, scores: Vec::new(), scored_qty: None }
    }
}

/// Builds a packing plan one unit at a time. Each step scores every
/// admissible placement in every open container and at the origin of a new
/// one, then commits an RCL choice.
pub fn greedy_solve(
    inst: &Instance,
    scorer: &dyn Scorer,
    profile: ConstraintProfile,
    opts: SolveOptions,
) -> Result<Solution, SolveError> {
    check_beta(opts.beta).map_err(|e| SolveError::Invariant(e.to_string()))?;
    let ctx = Ctx {
        inst,
        profile,
        groups: if profile.separation { inst.separation_groups() } else { None },
        tol: opts.tol,
    };
    let n_types = inst.item_types.len();
    let total = inst.total_units();
    let mut remaining: Vec<u32> = inst.item_types.iter().map(|t| t.quantity).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let empty = ContainerState::new(0);
    let mut fresh: Vec<Cell> = (0..n_types).map(|t| ctx.build_cell(&empty, t)).collect();
    let mut containers: Vec<ContainerState> = Vec::new();
    let mut cells: Vec<Vec<Option<Cell>>> = Vec::new();
    let mut placements = Vec::with_capacity(total as usize);
    let mut scored: Vec<Scored<PlacementDecision>> = Vec::new();

    for placed in 0..total {
        if opts.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(SolveError::Timeout { placed, total });
        }
        scored.clear();
        for t in (0..n_types).filter(|&t| remaining[t] > 0) {
            for (c, state) in containers.iter().enumerate() {
                let cell = cells[c][t].get_or_insert_with(|| ctx.build_cell(state, t));
                cell.rescore(remaining[t], scorer);
                push_cell(&mut scored, cell, c as i64, t);
            }
            fresh[t].rescore(remaining[t], scorer);
            push_cell(&mut scored, &fresh[t], -1, t);
        }
        let choice = match rcl_select(&scored, opts.beta, &mut rng) {
            Ok(s) => s.candidate,
            Err(_) => {
                return Err(SolveError::Invariant(format!(
                    "no admissible placement with {} units left, not even in a new container",
                    total - placed
                )))
            }
        };

        let t = choice.item_type_index;
        let item = &inst.item_types[t];
        let c = if choice.opens_container() {
            containers.push(ContainerState::new(containers.len()));
            cells.push((0..n_types).map(|_| None).collect());
            containers.len() - 1
        } else {
            choice.container_index as usize
        };
        containers[c].place(PlacedBox::new(item.id.clone(), choice.pos, item.base, choice.orientation));
        cells[c].iter_mut().for_each(|cell| *cell = None);
        remaining[t] -= 1;
        placements.push(Placement {
            container_index: c,
            item_type_id: item.id.clone(),
            pos: choice.pos,
            orientation: choice.orientation,
        });
    }
    Ok(Solution::from_placements(inst.name.clone(), placements))
}

fn push_cell(out: &mut Vec<Scored<PlacementDecision>>, cell: &Cell, container_index: i64, t: usize) {
    out.extend(cell.geo.iter().zip(&cell.scores).map(|(g, &score)| Scored {
        candidate: PlacementDecision { container_index, item_type_index: t, pos: g.pos, orientation: g.orientation },
        score,
    }));
}

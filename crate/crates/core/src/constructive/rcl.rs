//! Restricted candidate list selection.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Orientation, Position};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RclError {
    #[error("no candidates to choose from")]
    Empty,
    #[error("beta must lie in [0, 1], got {0}")]
    Beta(f64),
}

/// One committed step of a greedy solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementDecision {
    /// Existing container, or -1 to open a new one.
    pub container_index: i64,
    pub item_type_index: usize,
    pub pos: Position,
    pub orientation: Orientation,
}

impl PlacementDecision {
    pub fn opens_container(&self) -> bool {
        self.container_index < 0
    }
}

impl Eq for PlacementDecision {}

/// Tie-break order: placements into open containers first, then lowest z,
/// y, x, item index, orientation index and container index.
impl Ord for PlacementDecision {
    fn cmp(&self, other: &Self) -> Ordering {
        self.opens_container()
            .cmp(&other.opens_container())
            .then(self.pos.z.total_cmp(&other.pos.z))
            .then(self.pos.y.total_cmp(&other.pos.y))
            .then(self.pos.x.total_cmp(&other.pos.x))
            .then(self.item_type_index.cmp(&other.item_type_index))
            .then(self.orientation.cmp(&other.orientation))
            .then(self.container_index.cmp(&other.container_index))
    }
}

impl PartialOrd for PlacementDecision {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored<C> {
    pub candidate: C,
    pub score: f64,
}

/// Lowest admissible score for the list.
pub fn rcl_threshold(s_min: f64, s_max: f64, beta: f64) -> f64 {
    s_max - beta * (s_max - s_min)
}

pub(crate) fn check_beta(beta: f64) -> Result<(), RclError> {
    if (0.0..=1.0).contains(&beta) {
        Ok(())
    } else {
        Err(RclError::Beta(beta))
    }
}

/// Uniform choice among candidates scoring at least the threshold. With
/// β = 0 the choice is the best score, ties broken by the smallest candidate.
pub fn rcl_select<'a, C: Ord, R: Rng + ?Sized>(
    scored: &'a [Scored<C>],
    beta: f64,
    rng: &mut R,
) -> Result<&'a Scored<C>, RclError> {
    check_beta(beta)?;
    if scored.is_empty() {
        return Err(RclError::Empty);
    }
    let (lo, hi) = scored
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.score), hi.max(s.score)));
    if beta == 0.0 {
        let best = scored
            .iter()
            .filter(|s| s.score >= hi)
            .min_by(|a, b| a.candidate.cmp(&b.candidate))
            .expect("the maximum is attained");
        return Ok(best);
    }
    let t = rcl_threshold(lo, hi, beta);
    let list: Vec<&Scored<C>> = scored.iter().filter(|s| s.score >= t).collect();
    Ok(list[rng.gen_range(0..list.len())])
}

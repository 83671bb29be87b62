//! Scoring strategies for candidate placements.

use super::Features;

/// Maps the features of a candidate placement to a score; higher wins.
pub trait Scorer: Send + Sync {
    fn score(&self, f: &Features) -> f64;

    fn name(&self) -> String;
}

/// The best evolved heuristic: volume utilization dominates, with small
/// rewards for high remaining demand and for flush contact.
pub fn score_utilization(f: &Features) -> f64 {
    0.9 * f.vol_util + 0.05 * f.quantity + 0.05 * f.adjacency
}

#[derive(Debug, Clone, Copy, Default)]
pub struct UtilizationScorer;

impl Scorer for UtilizationScorer {
    fn score(&self, f: &Features) -> f64 {
        score_utilization(f)
    }

    fn name(&self) -> String {
        "utilization".into()
    }
}

/// Same score for every candidate, so selection falls to the tie-break
/// (β = 0) or is uniform over all candidates (β > 0).
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantScorer(pub f64);

impl Scorer for ConstantScorer {
    fn score(&self, _: &Features) -> f64 {
        self.0
    }

    fn name(&self) -> String {
        "constant".into()
    }
}

impl<S: Scorer + ?Sized> Scorer for &S {
    fn score(&self, f: &Features) -> f64 {
        (**self).score(f)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

impl<S: Scorer + ?Sized> Scorer for Box<S> {
    fn score(&self, f: &Features) -> f64 {
        (**self).score(f)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

//! Fixed-capacity elitist population.

use rand::Rng;
use serde::Deserialize;

use crate::candidate::Candidate;

/// How parents are drawn from the population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Weight `n - rank`, so the best of `n` members is `n` times as likely
    /// as the worst.
    #[default]
    RankWeighted,
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    /// Valid candidates, best (lowest fitness) first; ties keep the older.
    members: Vec<Candidate>,
    capacity: usize,
    pub generation: u32,
}

fn fitness(c: &Candidate) -> f64 {
    c.fitness.expect("members are valid")
}

impl Population {
    pub fn new(capacity: usize) -> Option<Self> {
        (capacity >= 1).then(|| Self { members: Vec::new(), capacity, generation: 0 })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn members(&self) -> &[Candidate] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> Option<&Candidate> {
        self.members.first()
    }

    pub fn mean_fitness(&self) -> Option<f64> {
        (!self.members.is_empty()).then(|| self.members.iter().map(fitness).sum::<f64>() / self.members.len() as f64)
    }

    /// Whether a member already has `c`'s program.
    pub fn contains_program(&self, c: &Candidate) -> bool {
        c.program.as_ref().is_some_and(|p| self.members.iter().any(|m| m.program.as_ref() == Some(p)))
    }

    /// Adds the valid candidates and keeps the best `capacity`. Invalid ones
    /// are ignored.
    pub fn admit(&mut self, candidates: impl IntoIterator<Item = Candidate>) {
        self.members.extend(candidates.into_iter().filter(Candidate::is_valid));
        self.members.sort_by(|a, b| fitness(a).total_cmp(&fitness(b)).then(a.id.cmp(&b.id)));
        self.members.truncate(self.capacity);
    }

    /// Up to `k` distinct members.
    pub fn select_parents<R: Rng + ?Sized>(&self, k: usize, scheme: Selection, rng: &mut R) -> Vec<&Candidate> {
        let mut pool: Vec<usize> = (0..self.members.len()).collect();
        let mut out = Vec::new();
        while out.len() < k && !pool.is_empty() {
            let weights: Vec<usize> = match scheme {
                Selection::RankWeighted => pool.iter().map(|&rank| self.members.len() - rank).collect(),
                Selection::Uniform => vec![1; pool.len()],
            };
            let mut ticket = rng.gen_range(0..weights.iter().sum::<usize>());
            let pick = weights
                .iter()
                .position(|&w| {
                    if ticket < w {
                        true
                    } else {
                        ticket -= w;
                        false
                    }
                })
                .expect("ticket below total weight");
            out.push(&self.members[pool.remove(pick)]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidate::{Lineage, Operator, Status};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use stowage_core::dsl::ScoreProgram;

    fn member(id: u64, f: f64) -> Candidate {
        let mut c = Candidate::untested(id, String::new(), format!("{id}"), Lineage { operator: Operator::E1, parents: vec![] });
        c.program = Some(ScoreProgram::constant(id as f64));
        c.fitness = Some(f);
        c.status = Status::Valid;
        c
    }

    #[test]
    fn keeps_best_and_older_on_ties() {
        let mut p = Population::new(2).unwrap();
        p.admit([member(0, 3.0), member(1, 2.0)]);
        p.admit([member(2, 2.0), member(3, 5.0)]);
        let ids: Vec<u64> = p.members().iter().map(|c| c.id).collect();
        assert_eq!(ids, vec![1, 2]);
        let mut bad = member(4, 0.0);
        bad.status = Status::Timeout;
        p.admit([bad]);
        assert_eq!(p.best().unwrap().id, 1);
        assert!(Population::new(0).is_none());
    }

    #[test]
    fn rank_weighting_prefers_the_best() {
        let mut p = Population::new(5).unwrap();
        p.admit((0..5).map(|i| member(i, i as f64)));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut hits = [0usize; 5];
        for _ in 0..15_000 {
            let picked = p.select_parents(1, Selection::RankWeighted, &mut rng);
            hits[picked[0].id as usize] += 1;
        }
        // Expected shares 5:4:3:2:1 out of 15.
        for (i, &h) in hits.iter().enumerate() {
            let expected = 15_000.0 * (5 - i) as f64 / 15.0;
            assert!((h as f64 - expected).abs() < 0.08 * expected, "rank {i}: {h} vs {expected}");
        }
        let two = p.select_parents(2, Selection::Uniform, &mut rng);
        assert_ne!(two[0].id, two[1].id);
        assert_eq!(p.select_parents(9, Selection::RankWeighted, &mut rng).len(), 5);
    }
}

use std::collections::HashMap;

use crate::config::ArchiveConfig;
use crate::container::dominance::{exclusive_eps_dominates, NoveltyQuality};
use crate::container::knn::{BucketIndex, Neighbor};
use crate::container::{AddOutcome, Container, RejectReason};
use crate::error::QdError;
use crate::types::{Individual, IndividualId};

/// Unstructured archive whose members stay more than `l` apart.
///
/// A candidate further than `l` from every member is added. A candidate
/// closer than `l` to its nearest member may replace that member, provided
/// it stays more than `l` from every other member and exclusively
/// epsilon-dominates it on (novelty, quality).
#[derive(Debug, Clone)]
pub struct ArchiveContainer {
    config: ArchiveConfig,
    dim: usize,
    quality_offset: f64,
    members: Vec<Individual>,
    by_id: HashMap<IndividualId, usize>,
    index: BucketIndex,
}

impl ArchiveContainer {
    pub fn new(config: ArchiveConfig, dim: usize, quality_offset: f64) -> Self {
        Self {
            config,
            dim,
            quality_offset,
            members: Vec::new(),
            by_id: HashMap::new(),
            index: BucketIndex::new(dim),
        }
    }

    pub fn config(&self) -> &ArchiveConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn quality_offset(&self) -> f64 {
        self.quality_offset
    }

    /// Novelty reported when there is nothing to compare against: the
    /// diagonal of the unit descriptor cube.
    pub fn diameter(&self) -> f64 {
        (self.dim as f64).sqrt()
    }

    pub fn quality(&self, fitness: f64) -> f64 {
        fitness + self.quality_offset
    }

    pub fn nearest(&self, coords: &[f64], k: usize, exclude: Option<IndividualId>) -> Vec<Neighbor> {
        self.index.nearest(&self.members, coords, k, exclude)
    }

    /// Mean distance to the `k_nn` nearest members other than `exclude`.
    pub fn novelty(&self, coords: &[f64], exclude: Option<IndividualId>) -> f64 {
        let near = self.nearest(coords, self.config.k_nn, exclude);
        if near.is_empty() {
            return self.diameter();
        }
        near.iter().map(|n| n.distance).sum::<f64>() / near.len() as f64
    }

    /// How many of the `k_nn` nearest other members have strictly lower fitness.
    pub fn local_quality(&self, indiv: &Individual) -> u32 {
        self.nearest(indiv.descriptor().coords(), self.config.k_nn, Some(indiv.id()))
            .iter()
            .filter(|n| self.members[n.slot].fitness() < indiv.fitness())
            .count() as u32
    }

    fn check(&self, indiv: &Individual) -> Result<(), QdError> {
        if indiv.descriptor().dim() != self.dim {
            return Err(QdError::DescriptorDimension {
                expected: self.dim,
                got: indiv.descriptor().dim(),
            });
        }
        let q = self.quality(indiv.fitness());
        if q.is_nan() || q <= 0.0 {
            return Err(QdError::NonPositiveQuality(q));
        }
        Ok(())
    }

    fn push(&mut self, indiv: Individual) {
        let slot = self.members.len();
        self.index.insert(slot, indiv.descriptor().coords());
        self.by_id.insert(indiv.id(), slot);
        self.members.push(indiv);
    }

    fn replace(&mut self, slot: usize, indiv: Individual) -> IndividualId {
        let old = &self.members[slot];
        let evicted = old.id();
        self.index.remove(slot, old.descriptor().coords());
        self.by_id.remove(&evicted);
        self.index.insert(slot, indiv.descriptor().coords());
        self.by_id.insert(indiv.id(), slot);
        self.members[slot] = indiv;
        evicted
    }
}

impl Container for ArchiveContainer {
    fn add(&mut self, indiv: Individual) -> Result<AddOutcome, QdError> {
        self.check(&indiv)?;
        let l = self.config.l;
        let near = self.nearest(indiv.descriptor().coords(), 2, None);
        let Some(first) = near.first().copied() else {
            self.push(indiv);
            return Ok(AddOutcome::AddedNew);
        };
        if first.distance > l {
            self.push(indiv);
            return Ok(AddOutcome::AddedNew);
        }
        if near.get(1).is_some_and(|second| second.distance <= l) {
            return Ok(AddOutcome::Rejected(RejectReason::TooClose));
        }

        // Both contenders are scored against the archive without the incumbent.
        let incumbent = &self.members[first.slot];
        let challenger = NoveltyQuality::new(
            self.novelty(indiv.descriptor().coords(), Some(incumbent.id())),
            self.quality(indiv.fitness()),
        );
        let defender = NoveltyQuality::new(
            self.novelty(incumbent.descriptor().coords(), Some(incumbent.id())),
            self.quality(incumbent.fitness()),
        );
        if exclusive_eps_dominates(challenger, defender, self.config.epsilon)? {
            let evicted = self.replace(first.slot, indiv);
            Ok(AddOutcome::Replaced(evicted))
        } else {
            Ok(AddOutcome::Rejected(RejectReason::NotDominating))
        }
    }

    fn update(&mut self) {
        let scores: Vec<(f64, u32)> = self
            .members
            .iter()
            .map(|m| {
                (
                    self.novelty(m.descriptor().coords(), Some(m.id())),
                    self.local_quality(m),
                )
            })
            .collect();
        for (m, (n, q)) in self.members.iter_mut().zip(scores) {
            m.novelty = n;
            m.local_quality = q;
        }
    }

    fn members(&self) -> &[Individual] {
        &self.members
    }

    fn get_mut(&mut self, id: IndividualId) -> Option<&mut Individual> {
        let slot = *self.by_id.get(&id)?;
        Some(&mut self.members[slot])
    }

    fn get(&self, id: IndividualId) -> Option<&Individual> {
        self.by_id.get(&id).map(|&slot| &self.members[slot])
    }

    fn novelty_of(&self, indiv: &Individual) -> f64 {
        self.novelty(indiv.descriptor().coords(), Some(indiv.id()))
    }

    fn local_quality_of(&self, indiv: &Individual) -> u32 {
        self.local_quality(indiv)
    }

    fn reports_novelty(&self) -> bool {
        true
    }

    fn cell_label(&self, _indiv: &Individual) -> Option<String> {
        None
    }
}

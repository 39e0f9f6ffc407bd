//! Selection operators producing the next parent batch.
//!
//! Collection-wide selectors (`uniform`, `score_proportionate`) draw from
//! the container. Population selectors (`population`, `pareto`) draw from
//! the previous parents and offspring, scored against the container.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::config::{Score, SelectorConfig, SelectorKind};
use crate::container::Container;
use crate::nsga;
use crate::types::{Encoding, Genotype, Individual};

/// One slot of a parent batch.
#[derive(Debug, Clone, PartialEq)]
pub enum Selected {
    /// A brand-new random genotype; its offspring is the genotype itself.
    Fresh(Genotype),
    /// An evaluated individual to be mutated.
    Parent(Individual),
}

impl Selected {
    pub fn parent(&self) -> Option<&Individual> {
        match self {
            Selected::Parent(p) => Some(p),
            Selected::Fresh(_) => None,
        }
    }
}

pub fn select_no_selection<R: Rng + ?Sized>(
    encoding: Encoding,
    genotype_size: usize,
    batch_size: usize,
    rng: &mut R,
) -> Vec<Selected> {
    (0..batch_size)
        .map(|_| Selected::Fresh(Genotype::random(encoding, genotype_size, rng)))
        .collect()
}

/// Uniform draws with replacement over the members. `None` when empty.
pub fn select_uniform<C: Container + ?Sized, R: Rng + ?Sized>(
    container: &C,
    batch_size: usize,
    rng: &mut R,
) -> Option<Vec<Individual>> {
    let members = container.members();
    if members.is_empty() {
        return None;
    }
    Some(
        (0..batch_size)
            .map(|_| members[rng.gen_range(0..members.len())].clone())
            .collect(),
    )
}

/// Current value of `score` for a container member.
pub fn member_score(indiv: &Individual, score: Score) -> f64 {
    match score {
        Score::Fitness => indiv.fitness(),
        Score::Novelty => indiv.novelty,
        Score::Curiosity => indiv.curiosity,
    }
}

/// Roulette weights `(s - s_min) + delta` with `delta = 1e-6 * max(s_max - s_min, 1)`,
/// so the worst member keeps a vanishing but non-zero chance.
pub fn roulette_weights(scores: &[f64]) -> Vec<f64> {
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let delta = 1e-6 * (max - min).max(1.0);
    scores.iter().map(|s| (s - min) + delta).collect()
}

pub fn select_score_proportionate<C: Container + ?Sized, R: Rng + ?Sized>(
    container: &C,
    score: Score,
    batch_size: usize,
    rng: &mut R,
) -> Option<Vec<Individual>> {
    let members = container.members();
    if members.is_empty() {
        return None;
    }
    let scores: Vec<f64> = members.iter().map(|m| member_score(m, score)).collect();
    let wheel = WeightedIndex::new(roulette_weights(&scores)).expect("roulette weights are positive");
    Some(
        (0..batch_size)
            .map(|_| members[wheel.sample(rng)].clone())
            .collect(),
    )
}

/// Scores a population member at selection time. Curiosity is read from the
/// container-resident record when the individual is still stored there.
fn population_score<C: Container + ?Sized>(container: &C, indiv: &Individual, score: Score) -> f64 {
    match score {
        Score::Fitness => indiv.fitness(),
        Score::Novelty => container.novelty_of(indiv),
        Score::Curiosity => container
            .get(indiv.id())
            .map_or(indiv.curiosity, |resident| resident.curiosity),
    }
}

/// Tournament winner: highest score, ties to the lower id.
fn better(a: (f64, u64), b: (f64, u64)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// `batch_size` tournaments of `tournament_size` entrants drawn with
/// replacement from `prev_parents ∪ prev_offspring`.
pub fn select_population<C: Container + ?Sized, R: Rng + ?Sized>(
    prev_parents: &[Individual],
    prev_offspring: &[Individual],
    container: &C,
    score: Score,
    tournament_size: usize,
    batch_size: usize,
    rng: &mut R,
) -> Vec<Individual> {
    let pool: Vec<&Individual> = prev_parents.iter().chain(prev_offspring).collect();
    if pool.is_empty() {
        return Vec::new();
    }
    let keyed: Vec<(f64, u64)> = pool
        .iter()
        .map(|i| (population_score(container, i, score), i.id()))
        .collect();
    (0..batch_size)
        .map(|_| {
            let mut best = rng.gen_range(0..pool.len());
            for _ in 1..tournament_size {
                let challenger = rng.gen_range(0..pool.len());
                if better(keyed[challenger], keyed[best]) {
                    best = challenger;
                }
            }
            pool[best].clone()
        })
        .collect()
}

/// NSGA-II selection of `batch_size` individuals from
/// `prev_parents ∪ prev_offspring` on (novelty, local quality), both
/// computed against the container.
pub fn select_pareto<C: Container + ?Sized>(
    prev_parents: &[Individual],
    prev_offspring: &[Individual],
    container: &C,
    batch_size: usize,
) -> Vec<Individual> {
    let pool: Vec<&Individual> = prev_parents.iter().chain(prev_offspring).collect();
    if pool.is_empty() {
        return Vec::new();
    }
    let points: Vec<Vec<f64>> = pool
        .iter()
        .map(|i| vec![container.novelty_of(i), container.local_quality_of(i) as f64])
        .collect();
    let ids: Vec<u64> = pool.iter().map(|i| i.id()).collect();
    let take = batch_size.min(pool.len());
    let mut chosen: Vec<Individual> = nsga::select(&points, &ids, take)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect();
    // A pool smaller than the batch is cycled to keep the batch shape.
    let mut i = 0;
    while chosen.len() < batch_size {
        chosen.push(chosen[i].clone());
        i += 1;
    }
    chosen
}

/// The configured selection operator plus the fallbacks the run loop needs.
#[derive(Debug, Clone)]
pub struct Selector {
    config: SelectorConfig,
    encoding: Encoding,
    genotype_size: usize,
}

impl Selector {
    pub fn new(config: SelectorConfig, encoding: Encoding, genotype_size: usize) -> Self {
        Self {
            config,
            encoding,
            genotype_size,
        }
    }

    pub fn config(&self) -> &SelectorConfig {
        &self.config
    }

    /// Next parent batch. Falls back to fresh random genotypes whenever the
    /// source the selector draws from is empty.
    pub fn select<C: Container + ?Sized, R: Rng + ?Sized>(
        &self,
        container: &C,
        prev_parents: &[Individual],
        prev_offspring: &[Individual],
        batch_size: usize,
        rng: &mut R,
    ) -> Vec<Selected> {
        let picked = match self.config.kind {
            SelectorKind::NoSelection => None,
            SelectorKind::Uniform => select_uniform(container, batch_size, rng),
            SelectorKind::ScoreProportionate => select_score_proportionate(
                container,
                self.config.score.unwrap_or(Score::Fitness),
                batch_size,
                rng,
            ),
            SelectorKind::Population => Some(select_population(
                prev_parents,
                prev_offspring,
                container,
                self.config.score.unwrap_or(Score::Fitness),
                self.config.tournament_size,
                batch_size,
                rng,
            ))
            .filter(|b| !b.is_empty()),
            SelectorKind::Pareto if container.is_empty() => None,
            SelectorKind::Pareto => {
                Some(select_pareto(prev_parents, prev_offspring, container, batch_size))
                    .filter(|b| !b.is_empty())
            }
        };
        match picked {
            Some(batch) => batch.into_iter().map(Selected::Parent).collect(),
            None => select_no_selection(self.encoding, self.genotype_size, batch_size, rng),
        }
    }
}

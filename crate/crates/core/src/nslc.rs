//! Novelty Search with Local Competition.
//!
//! A fixed-size population is scored on (novelty, local quality) against an
//! append-only novelty archive and evolved with NSGA-II survivor selection.
//! Every offspring is also offered to a passive result grid, so the outcome
//! can be measured with the same metrics as the other variants.

use serde::{Deserialize, Serialize};

use crate::config::{ContainerConfig, RunConfig};
use crate::container::knn::{BucketIndex, Neighbor};
use crate::container::{AnyContainer, Container, GridContainer};
use crate::error::QdError;
use crate::metrics::compute_metrics;
use crate::nsga;
use crate::run::{AddEvent, Evaluator, Parallelism, RunOutput};
use crate::tasks::Task;
use crate::types::{rng_from_seed, Genotype, Individual, IndividualId};
use crate::variation::mutate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NslcParams {
    /// Initial novelty needed to enter the archive.
    pub rho_init: f64,
    pub k_nn: usize,
    /// More additions than this in one batch raise the threshold.
    pub crowded_additions: usize,
    pub raise_factor: f64,
    /// This many consecutive batches without additions lower the threshold.
    pub idle_batches: usize,
    pub lower_factor: f64,
}

impl NslcParams {
    pub fn new(rho_init: f64) -> Self {
        Self {
            rho_init,
            k_nn: 15,
            crowded_additions: 10,
            raise_factor: 1.2,
            idle_batches: 25,
            lower_factor: 0.95,
        }
    }

    pub fn validate(&self) -> Result<(), QdError> {
        if !(self.rho_init > 0.0 && self.rho_init.is_finite()) {
            return Err(QdError::Config(format!("rho_init must be positive, got {}", self.rho_init)));
        }
        if self.k_nn == 0 {
            return Err(QdError::Config("k_nn must be at least 1".into()));
        }
        if !(self.raise_factor >= 1.0 && self.lower_factor > 0.0 && self.lower_factor <= 1.0) {
            return Err(QdError::Config("rho factors must satisfy raise >= 1 and 0 < lower <= 1".into()));
        }
        Ok(())
    }
}

/// Exploration archive. Members are never removed or replaced.
#[derive(Debug, Clone)]
pub struct NoveltyArchive {
    members: Vec<Individual>,
    index: BucketIndex,
    dim: usize,
    k_nn: usize,
    rho: f64,
}

impl NoveltyArchive {
    pub fn new(dim: usize, k_nn: usize, rho_init: f64) -> Self {
        Self {
            members: Vec::new(),
            index: BucketIndex::new(dim),
            dim,
            k_nn,
            rho: rho_init,
        }
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    fn nearest(&self, indiv: &Individual) -> Vec<Neighbor> {
        self.index
            .nearest(&self.members, indiv.descriptor().coords(), self.k_nn, Some(indiv.id()))
    }

    /// Mean distance to the nearest archived individuals other than itself;
    /// the unit-cube diagonal when there are none.
    pub fn novelty(&self, indiv: &Individual) -> f64 {
        let near = self.nearest(indiv);
        if near.is_empty() {
            return (self.dim as f64).sqrt();
        }
        near.iter().map(|n| n.distance).sum::<f64>() / near.len() as f64
    }

    pub fn local_quality(&self, indiv: &Individual) -> u32 {
        self.nearest(indiv)
            .iter()
            .filter(|n| self.members[n.slot].fitness() < indiv.fitness())
            .count() as u32
    }

    fn push(&mut self, indiv: Individual) {
        self.index.insert(self.members.len(), indiv.descriptor().coords());
        self.members.push(indiv);
    }
}

/// Population, novelty archive and result grid between batches.
#[derive(Debug, Clone)]
pub struct NslcState {
    pub population: Vec<Individual>,
    pub archive: NoveltyArchive,
    pub grid: GridContainer,
    idle: usize,
}

impl NslcState {
    /// Scores `population ∪ offspring` against the archive as it stood at the
    /// start of the step, archives novel offspring, keeps the NSGA-II
    /// survivors and adapts the threshold. Returns the number archived.
    fn advance(&mut self, offspring: &[Individual], params: &NslcParams, batch_size: usize) -> usize {
        let mut pool: Vec<Individual> = std::mem::take(&mut self.population);
        let first_offspring = pool.len();
        pool.extend(offspring.iter().cloned());
        for indiv in &mut pool {
            indiv.novelty = self.archive.novelty(indiv);
            indiv.local_quality = self.archive.local_quality(indiv);
        }
        let rho = self.archive.rho;
        let novel: Vec<Individual> = pool[first_offspring..]
            .iter()
            .filter(|o| o.novelty > rho)
            .cloned()
            .collect();
        let added = novel.len();
        novel.into_iter().for_each(|o| self.archive.push(o));

        let points: Vec<Vec<f64>> = pool
            .iter()
            .map(|p| vec![p.novelty, p.local_quality as f64])
            .collect();
        let keys: Vec<u64> = pool.iter().map(Individual::id).collect();
        let survivors = nsga::select(&points, &keys, batch_size.min(pool.len()));
        self.population = survivors.into_iter().map(|i| pool[i].clone()).collect();

        if added > params.crowded_additions {
            self.archive.rho *= params.raise_factor;
        }
        if added == 0 {
            self.idle += 1;
            if self.idle >= params.idle_batches {
                self.archive.rho *= params.lower_factor;
                self.idle = 0;
            }
        } else {
            self.idle = 0;
        }
        added
    }
}

/// Runs NSLC for `config.iterations` batches. The container in `config`
/// must be a grid; it receives every evaluated individual.
pub fn run_nslc(
    config: &RunConfig,
    params: &NslcParams,
    task: &dyn Task,
    parallelism: Parallelism,
) -> Result<RunOutput, QdError> {
    config.validate(task)?;
    params.validate()?;
    let grid_config = match &config.container {
        ContainerConfig::Grid(g) => g.clone(),
        ContainerConfig::Archive(_) => {
            return Err(QdError::Config("NSLC offers its individuals to a grid container".into()))
        }
    };
    let evaluator = Evaluator::new(parallelism)?;
    let mut rng = rng_from_seed(config.seed);
    let mut next_id: IndividualId = 0;
    let mut fresh_id = || {
        next_id += 1;
        next_id - 1
    };
    let b = config.batch_size;
    let mut state = NslcState {
        population: Vec::new(),
        archive: NoveltyArchive::new(task.descriptor_size(), params.k_nn, params.rho_init),
        grid: GridContainer::new(grid_config),
        idle: 0,
    };
    let mut trace = Vec::new();
    let mut events = Vec::new();
    let mut evals: u64 = 0;

    for iteration in 1..=config.iterations {
        let mut pending = Vec::with_capacity(b);
        if iteration == 1 {
            let initial: Vec<_> = (0..b)
                .map(|_| (fresh_id(), None, Genotype::random(task.encoding(), task.genotype_size(), &mut rng)))
                .collect();
            state.population = evaluator.evaluate(task, iteration, initial)?;
            for indiv in &state.population {
                let outcome = state.grid.add(indiv.clone())?;
                events.push(AddEvent {
                    batch: iteration,
                    offspring: indiv.id(),
                    parent: None,
                    outcome,
                    curiosity_applied: false,
                });
            }
            evals += b as u64;
            for _ in 0..b {
                pending.push((fresh_id(), None, Genotype::random(task.encoding(), task.genotype_size(), &mut rng)));
            }
        } else {
            for parent in &state.population {
                let child = mutate(parent.genotype(), &config.mutation, &mut rng);
                pending.push((fresh_id(), Some(parent.id()), child));
            }
        }
        let offspring = evaluator.evaluate(task, iteration, pending)?;
        evals += offspring.len() as u64;
        for indiv in &offspring {
            let outcome = state.grid.add(indiv.clone())?;
            events.push(AddEvent {
                batch: iteration,
                offspring: indiv.id(),
                parent: indiv.parent_id(),
                outcome,
                curiosity_applied: false,
            });
        }
        state.advance(&offspring, params, b);
        state.grid.update();
        if iteration % config.log_interval == 0 || iteration == config.iterations {
            trace.push(compute_metrics(&state.grid, task.quality_offset(), iteration, evals));
        }
    }

    Ok(RunOutput {
        container: AnyContainer::Grid(state.grid),
        trace,
        events,
    })
}
